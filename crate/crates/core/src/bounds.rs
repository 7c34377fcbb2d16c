//! Explicit constants and exponents for the nodal-extrema inequalities,
//! plus the bound-evaluation and scaling-regression engine.
//!
//! Explicit right-hand sides are only asserted where the constants are
//! explicit (the reverse Hölder constant K_{n,p}, the superlevel-volume
//! constant, Faber-Krahn, the 4^n p-Laplacian bound). Where the claims come
//! with non-explicit constants, the engine reports fitted log-log slopes and
//! empirical constants instead of inventing thresholds.

use crate::error::{Error, Result};
use crate::nodal::{superlevel_volumes, NodalDecomposition};
use crate::specfun::{
    bessel_first_zero, bessel_j, gamma, integrate_with_error, unit_ball_volume, BesselOrder,
};
use crate::spectra::{lp_norm, EigenPair};

/// Tolerance added to claimed exponents in fitted-slope assertions; grid
/// error and small-eigenvalue transients make exact matching impossible,
/// and 0.1 separates the claimed exponents from the nearest competing
/// power in the model families.
pub const SLOPE_TOLERANCE: f64 = 0.1;

/// Where a right-hand-side constant came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// the constant is explicit in closed form
    Explicit,
    /// the constant was fitted from the data (reported, not asserted)
    Fitted,
}

/// One evaluated inequality instance.
#[derive(Debug, Clone)]
pub struct BoundCheckReport {
    pub inequality: &'static str,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub constant_provenance: Provenance,
    pub margin: f64,
    pub pass: bool,
}

impl BoundCheckReport {
    pub fn new(
        inequality: &'static str,
        lambda: f64,
        lhs: f64,
        rhs: f64,
        provenance: Provenance,
    ) -> Self {
        let margin = rhs - lhs;
        BoundCheckReport {
            inequality,
            lambda,
            lhs,
            rhs,
            constant_provenance: provenance,
            margin,
            pass: margin >= -1e-12 * rhs.abs(),
        }
    }
}

/// Least-squares slope of log(quantity) against log(lambda).
#[derive(Debug, Clone, Copy)]
pub struct ScalingFit {
    pub slope: f64,
    pub stderr: f64,
    pub points: usize,
}

/// Fit `quantity ~ C * lambda^slope` through (lambda, quantity) pairs;
/// needs at least 5 pairs with strictly increasing positive lambda and
/// positive quantities.
pub fn fit_power_law(pairs: &[(f64, f64)]) -> Result<ScalingFit> {
    if pairs.len() < 5 {
        return Err(Error::InsufficientData {
            op: "fit_power_law",
            needed: 5,
            got: pairs.len(),
        });
    }
    if pairs.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::domain(
            "fit_power_law",
            "lambda values must be strictly increasing",
        ));
    }
    if pairs.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::domain(
            "fit_power_law",
            "pairs must be positive for a log-log fit",
        ));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let stderr = (ss_res / (n - 2.0) / sxx).sqrt();
    Ok(ScalingFit {
        slope,
        stderr,
        points: pairs.len(),
    })
}

/// The reverse Hölder constant K_{n,p} for first Dirichlet eigenfunctions,
/// evaluated from its closed form through the Bessel radial profile.
#[derive(Debug, Clone, Copy)]
pub struct ChitiConstant {
    pub n: u32,
    pub p: f64,
    pub value: f64,
    /// first-order propagation of the quadrature error estimate
    pub quad_error: f64,
}

/// K_{n,p} = 2^{1-n/2} (n alpha_n)^{-1/p} /
///           (Gamma(n/2) (int_0^j r^{p-np/2+n-1} J_{n/2-1}^p dr)^{1/p}).
pub fn chiti_constant(n: u32, p: f64) -> Result<ChitiConstant> {
    if n < 2 {
        return Err(Error::domain("chiti_constant", "dimension must be >= 2"));
    }
    if !(p >= 1.0) {
        return Err(Error::domain("chiti_constant", "exponent must be >= 1"));
    }
    let nf = n as f64;
    let order = BesselOrder::for_dimension(n)?;
    let j = bessel_first_zero(order)?;
    let q = p - nf * p / 2.0 + nf - 1.0;
    let tol = 1e-11;
    // negative radial powers get the r = t^2 substitution, which removes
    // the endpoint singularity entirely (the full integrand is regular)
    let (integral, err) = if q < 0.0 {
        integrate_with_error(
            |t: f64| {
                let r = t * t;
                2.0 * t.powf(2.0 * q + 1.0)
                    * bessel_j(order, r).expect("in-range argument").powf(p)
            },
            0.0,
            j.sqrt(),
            tol,
        )?
    } else {
        integrate_with_error(
            |r: f64| r.powf(q) * bessel_j(order, r).expect("in-range argument").powf(p),
            0.0,
            j,
            tol,
        )?
    };
    let alpha = unit_ball_volume(n)?;
    let value = 2f64.powf(1.0 - nf / 2.0) * (nf * alpha).powf(-1.0 / p)
        / (gamma(nf / 2.0) * integral.powf(1.0 / p));
    Ok(ChitiConstant {
        n,
        p,
        value,
        quad_error: value * err / (p * integral),
    })
}

/// The radial extremizer of the reverse Hölder inequality on the ball of
/// first eigenvalue `lambda`: `z(x) = |x|^{1-n/2} J_{n/2-1}(sqrt(lambda)|x|)`,
/// continued to its finite limit at the center.
pub fn extremal_z(n: u32, lambda: f64, x_norm: f64) -> Result<f64> {
    if n < 2 || !(lambda > 0.0) {
        return Err(Error::domain(
            "extremal_z",
            format!("need n >= 2 and lambda > 0, got n={n}, lambda={lambda}"),
        ));
    }
    let order = BesselOrder::for_dimension(n)?;
    let j = bessel_first_zero(order)?;
    let radius = j / lambda.sqrt();
    if !(0.0..=radius * (1.0 + 1e-12)).contains(&x_norm) {
        return Err(Error::domain(
            "extremal_z",
            format!("|x| = {x_norm} outside the ball of radius {radius}"),
        ));
    }
    let nf = n as f64;
    let nu = nf / 2.0 - 1.0;
    let s = lambda.sqrt() * x_norm;
    let scale = lambda.powf(nf / 4.0 - 0.5);
    if s < 1e-3 {
        // leading series of J_nu(s)/s^nu with its first correction
        let head = 1.0 / (2f64.powf(nu) * gamma(nu + 1.0));
        return Ok(scale * head * (1.0 - s * s / (4.0 * (nu + 1.0))));
    }
    Ok(x_norm.powf(1.0 - nf / 2.0) * bessel_j(order, s)?)
}

/// L^p growth exponent delta(p) for eigenfunctions of closed manifolds,
/// piecewise in p with breakpoint 2(n+1)/(n-1).
pub fn sogge_delta(n: u32, p: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("sogge_delta", "dimension must be >= 2"));
    }
    if !(p >= 2.0) {
        return Err(Error::domain("sogge_delta", "exponent must be >= 2"));
    }
    let nf = n as f64;
    let breakpoint = 2.0 * (nf + 1.0) / (nf - 1.0);
    Ok(if p <= breakpoint {
        (nf - 1.0) / 4.0 * (0.5 - 1.0 / p)
    } else {
        nf / 2.0 * (0.5 - 1.0 / p) - 0.25
    })
}

/// Conjectured boundary-manifold growth exponent alpha(p), piecewise with
/// breakpoint (6n+4)/(3n-4); evaluated empirically, never asserted.
pub fn smith_sogge_alpha(n: u32, p: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain(
            "smith_sogge_alpha",
            "breakpoint degenerates below n = 3",
        ));
    }
    if !(p >= 2.0) {
        return Err(Error::domain("smith_sogge_alpha", "exponent must be >= 2"));
    }
    let nf = n as f64;
    let breakpoint = (6.0 * nf + 4.0) / (3.0 * nf - 4.0);
    Ok(if p <= breakpoint {
        (2.0 / 3.0 + (nf - 2.0) / 2.0) * (0.25 - 1.0 / (2.0 * p))
    } else {
        nf / 2.0 * (0.5 - 1.0 / p) - 0.25
    })
}

/// Proven L^p exponent for Dirichlet eigenfunctions of manifolds with
/// boundary, `n/2 + np/2 (1/2 - 1/p) - p/4`, under the stated range
/// restriction (p >= 4 when n >= 4, p >= 5 when n = 3).
pub fn boundary_extrema_exponent(n: u32, p: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain(
            "boundary_extrema_exponent",
            "stated for n >= 3 only",
        ));
    }
    let min_p = if n == 3 { 5.0 } else { 4.0 };
    if p < min_p {
        return Err(Error::domain(
            "boundary_extrema_exponent",
            format!("requires p >= {min_p} in dimension {n}, got {p}"),
        ));
    }
    let nf = n as f64;
    Ok(nf / 2.0 + nf * p / 2.0 * (0.5 - 1.0 / p) - p / 4.0)
}

/// Exponent table for one dimension: both piecewise exponents and their
/// breakpoints.
#[derive(Debug, Clone, Copy)]
pub struct ExponentTable {
    pub n: u32,
}

impl ExponentTable {
    pub fn new(n: u32) -> Self {
        ExponentTable { n }
    }

    pub fn delta(&self, p: f64) -> Result<f64> {
        sogge_delta(self.n, p)
    }

    pub fn alpha(&self, p: f64) -> Result<f64> {
        smith_sogge_alpha(self.n, p)
    }

    pub fn delta_breakpoint(&self) -> f64 {
        let nf = self.n as f64;
        2.0 * (nf + 1.0) / (nf - 1.0)
    }

    pub fn alpha_breakpoint(&self) -> f64 {
        let nf = self.n as f64;
        (6.0 * nf + 4.0) / (3.0 * nf - 4.0)
    }
}

/// Superlevel-volume lower bound with the explicit Euclidean constant:
/// `(1-delta)^{n/2} (2(n-2))^{n/2} alpha_n lambda^{-n/2}` for n >= 3.
pub fn lemma12_bound(n: u32, delta: f64, lambda: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain(
            "lemma12_bound",
            "the explicit constant needs n >= 3",
        ));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::domain("lemma12_bound", "delta must be in (0, 1)"));
    }
    if !(lambda > 0.0) {
        return Err(Error::domain("lemma12_bound", "lambda must be positive"));
    }
    let nf = n as f64;
    let alpha = unit_ball_volume(n)?;
    Ok((1.0 - delta).powf(nf / 2.0)
        * (2.0 * (nf - 2.0)).powf(nf / 2.0)
        * alpha
        * lambda.powf(-nf / 2.0))
}

/// `||u||_inf <= K_{n,p} lambda^{n/(2p)} ||u||_p` for a first Dirichlet
/// eigenfunction on a Euclidean domain (equality exactly on balls).
///
/// The check is scale-invariant, so the field's normalization does not
/// matter. The caller is responsible for passing a first eigenfunction of
/// its (nodal) domain.
pub fn check_chiti_inequality(pair: &EigenPair, p: f64) -> Result<BoundCheckReport> {
    let domain = pair.field.grid().domain();
    if !domain.is_euclidean() {
        return Err(Error::domain(
            "check_chiti_inequality",
            "explicit constant applies to Euclidean domains only",
        ));
    }
    let n = domain.dimension();
    let constant = chiti_constant(n, p)?;
    let lhs = lp_norm(&pair.field, f64::INFINITY)?;
    let rhs = constant.value * pair.lambda.powf(n as f64 / (2.0 * p)) * lp_norm(&pair.field, p)?;
    Ok(BoundCheckReport::new(
        "chiti-reverse-holder",
        pair.lambda,
        lhs,
        rhs,
        Provenance::Explicit,
    ))
}

/// How `check_extrema_sums` evaluates the right-hand sides.
#[derive(Debug, Clone, Copy)]
pub enum SumCheckMode {
    /// Explicit K_{n,p} constants (Euclidean Dirichlet, p = 1 or 2), with a
    /// multiplicative slack on the right side absorbing grid measure error.
    Explicit { grid_slack: f64 },
    /// Fit the log-log slope and compare against a claimed exponent; rows
    /// report the empirical constant.
    Fitted { claimed_exponent: f64 },
}

/// Result of an extrema-sum check over a spectrum family.
#[derive(Debug, Clone)]
pub struct ExtremaSumCheck {
    pub reports: Vec<BoundCheckReport>,
    pub fit: Option<ScalingFit>,
    /// In fitted mode: whether slope <= claimed + SLOPE_TOLERANCE.
    pub slope_within: Option<bool>,
    /// Empirical constant: max over the family of lhs / lambda^exponent
    /// (fitted mode only).
    pub empirical_constant: Option<f64>,
}

/// Evaluate `sum_i m_i^p` against its claimed growth over a family of
/// decompositions from one domain family.
pub fn check_extrema_sums(
    decomps: &[NodalDecomposition],
    p: f64,
    mode: SumCheckMode,
) -> Result<ExtremaSumCheck> {
    if decomps.is_empty() {
        return Err(Error::InsufficientData {
            op: "check_extrema_sums",
            needed: 1,
            got: 0,
        });
    }
    let domain0 = decomps[0].field().grid().domain().clone();
    if decomps
        .iter()
        .any(|d| d.field().grid().domain() != &domain0)
    {
        return Err(Error::domain(
            "check_extrema_sums",
            "decompositions must come from one domain family",
        ));
    }
    let mut sums: Vec<(f64, f64)> = decomps
        .iter()
        .map(|d| {
            let s = crate::nodal::extrema_power_sum(d, p)?;
            Ok((d.lambda, s))
        })
        .collect::<Result<_>>()?;
    sums.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));

    match mode {
        SumCheckMode::Explicit { grid_slack } => {
            if !domain0.is_euclidean() {
                return Err(Error::domain(
                    "check_extrema_sums",
                    "explicit mode applies to Euclidean Dirichlet domains",
                ));
            }
            if p != 1.0 && p != 2.0 {
                return Err(Error::domain(
                    "check_extrema_sums",
                    format!("explicit constants exist for p = 1 and p = 2, got {p}"),
                ));
            }
            let n = domain0.dimension();
            let constant = chiti_constant(n, p)?;
            let volume = decomps[0].field().grid().total_measure();
            let reports = sums
                .iter()
                .map(|&(lambda, lhs)| {
                    let base = if p == 1.0 {
                        constant.value * volume.sqrt() * lambda.powf(n as f64 / 2.0)
                    } else {
                        constant.value * constant.value * lambda.powf(n as f64 / 2.0)
                    };
                    let rhs = base * (1.0 + grid_slack);
                    BoundCheckReport::new(
                        if p == 1.0 {
                            "extrema-sum-explicit-p1"
                        } else {
                            "extrema-sum-explicit-p2"
                        },
                        lambda,
                        lhs,
                        rhs,
                        Provenance::Explicit,
                    )
                })
                .collect();
            let fit_pairs = dedupe_max(&sums);
            let fit = if fit_pairs.len() >= 5 {
                Some(fit_power_law(&fit_pairs)?)
            } else {
                None
            };
            Ok(ExtremaSumCheck {
                reports,
                fit,
                slope_within: None,
                empirical_constant: None,
            })
        }
        SumCheckMode::Fitted { claimed_exponent } => {
            let fit_pairs = dedupe_max(&sums);
            if fit_pairs.len() < 5 {
                return Err(Error::InsufficientData {
                    op: "check_extrema_sums",
                    needed: 5,
                    got: fit_pairs.len(),
                });
            }
            let fit = fit_power_law(&fit_pairs)?;
            let empirical = fit_pairs
                .iter()
                .map(|&(lam, s)| s / lam.powf(claimed_exponent))
                .fold(0.0f64, f64::max);
            let reports = sums
                .iter()
                .map(|&(lambda, lhs)| {
                    BoundCheckReport::new(
                        "extrema-sum-fitted",
                        lambda,
                        lhs,
                        empirical * lambda.powf(claimed_exponent),
                        Provenance::Fitted,
                    )
                })
                .collect();
            Ok(ExtremaSumCheck {
                slope_within: Some(fit.slope <= claimed_exponent + SLOPE_TOLERANCE),
                empirical_constant: Some(empirical),
                reports,
                fit: Some(fit),
            })
        }
    }
}

/// Keep positive pairs, collapsing equal lambdas onto the larger quantity
/// (the binding side for an upper bound).
fn dedupe_max(sums: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &(lam, s) in sums {
        if !(lam > 0.0 && s > 0.0) {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.0 == lam => last.1 = last.1.max(s),
            _ => out.push((lam, s)),
        }
    }
    out
}

/// Result of the planar Neumann growth checks.
#[derive(Debug, Clone)]
pub struct NeumannCheck {
    /// fit of log sum m vs log mu
    pub sum_fit: ScalingFit,
    pub sum_within: bool,
    /// fit of log sum m^2 vs log mu
    pub sq_fit: ScalingFit,
    pub sq_within: bool,
    /// fit of the boundary-touching domain count vs mu (slope ~ 1/2)
    pub boundary_fit: ScalingFit,
    /// (mu, sum m, sum m^2, boundary-touching count) per decomposition
    pub rows: Vec<(f64, f64, f64, usize)>,
}

/// Fitted-slope checks for a planar Neumann family: both extrema sums must
/// grow at most linearly in mu, and the boundary-touching domain count like
/// sqrt(mu).
pub fn check_neumann(decomps: &[NodalDecomposition]) -> Result<NeumannCheck> {
    let mut rows: Vec<(f64, f64, f64, usize)> = Vec::new();
    for d in decomps {
        let mu = d.lambda;
        let sum = crate::nodal::extrema_power_sum(d, 1.0)?;
        let sq = crate::nodal::extrema_power_sum(d, 2.0)?;
        let boundary = d.domains.iter().filter(|dom| dom.touches_boundary).count();
        rows.push((mu, sum, sq, boundary));
    }
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
    let positive: Vec<&(f64, f64, f64, usize)> = rows.iter().filter(|r| r.0 > 1e-9).collect();
    let sum_pairs = dedupe_max(&positive.iter().map(|r| (r.0, r.1)).collect::<Vec<_>>());
    let sq_pairs = dedupe_max(&positive.iter().map(|r| (r.0, r.2)).collect::<Vec<_>>());
    let bd_pairs = dedupe_max(
        &positive
            .iter()
            .map(|r| (r.0, r.3 as f64))
            .collect::<Vec<_>>(),
    );
    let sum_fit = fit_power_law(&sum_pairs)?;
    let sq_fit = fit_power_law(&sq_pairs)?;
    let boundary_fit = fit_power_law(&bd_pairs)?;
    Ok(NeumannCheck {
        sum_within: sum_fit.slope <= 1.0 + SLOPE_TOLERANCE,
        sq_within: sq_fit.slope <= 1.0 + SLOPE_TOLERANCE,
        sum_fit,
        sq_fit,
        boundary_fit,
        rows,
    })
}

/// Term-by-term lower bound chain on the grid: with
/// `c = min_i Vol(V^i_{1/2}) lambda^{n/2} 2^{-p}`, the sum of extrema powers
/// satisfies `c * sum_i m_i^p <= lambda^{n/2} * integral of |u|^p`.
/// Returns `(lhs, rhs)`.
pub fn extrema_chain_check(nd: &NodalDecomposition, p: f64) -> Result<(f64, f64)> {
    let n = nd.field().grid().domain().dimension();
    let stats = superlevel_volumes(nd, &[0.5])?;
    let lam_pow = nd.lambda.powf(n as f64 / 2.0);
    let c = stats
        .per_domain
        .iter()
        .map(|v| v[0].1 * lam_pow * 2f64.powf(-p))
        .fold(f64::INFINITY, f64::min);
    let lhs = crate::nodal::extrema_power_sum(nd, p)? * c;
    let lp = lp_norm(nd.field(), p)?;
    let rhs = lam_pow * lp.powf(p);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodal::decompose;
    use crate::spectra::{analytic_spectrum, rectangle_neumann_modes, torus_sine_mode, DomainSpec};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn chiti_constants_in_dimension_three() {
        // frozen closed forms via J_{1/2}(r) = sqrt(2/(pi r)) sin r
        let k32 = chiti_constant(3, 2.0).unwrap();
        assert!(
            (k32.value - 1.0 / (PI * 2f64.sqrt())).abs() < 1e-8,
            "{}",
            k32.value
        );
        assert!(k32.quad_error <= 1e-8);

        let k31 = chiti_constant(3, 1.0).unwrap();
        assert!(
            (k31.value - 1.0 / (4.0 * PI * PI)).abs() < 1e-8,
            "{}",
            k31.value
        );

        // p = 3: reduce to (2/pi)^{3/2} * int sin^3(r)/r dr by the same
        // closed form and integrate by Simpson independently
        let m = 200_000;
        let h = PI / m as f64;
        let f = |r: f64| if r == 0.0 { 0.0 } else { r.sin().powi(3) / r };
        let mut simpson = f(0.0) + f(PI);
        for i in 1..m {
            simpson += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        simpson *= h / 3.0;
        let i3 = (2.0 / PI).powf(1.5) * simpson;
        let alpha3 = 4.0 * PI / 3.0;
        let want =
            2f64.powf(-0.5) * (3.0 * alpha3).powf(-1.0 / 3.0) / (gamma(1.5) * i3.powf(1.0 / 3.0));
        let k33 = chiti_constant(3, 3.0).unwrap();
        assert!((k33.value - want).abs() < 1e-8, "{} vs {want}", k33.value);
    }

    #[test]
    fn chiti_constant_input_validation() {
        assert!(chiti_constant(1, 2.0).is_err());
        assert!(chiti_constant(3, 0.5).is_err());
    }

    #[test]
    fn extremal_profile_center_and_boundary() {
        // n = 2: the center value is 1 for every lambda
        for lam in [0.5, 1.0, 7.3] {
            assert_relative_eq!(extremal_z(2, lam, 0.0).unwrap(), 1.0, max_relative = 1e-12);
        }
        // n = 3, lambda = 1: sin(r)/r shape vanishing at pi
        let z_pi = extremal_z(3, 1.0, PI).unwrap();
        assert!(z_pi.abs() < 1e-9, "{z_pi}");
        let z_half = extremal_z(3, 1.0, PI / 2.0).unwrap();
        assert_relative_eq!(
            z_half,
            (2.0 / PI).sqrt() * (PI / 2.0).sin() / (PI / 2.0),
            max_relative = 1e-10
        );
        // the small-argument branch joins the direct branch smoothly
        let lam = 4.0;
        let a = extremal_z(3, lam, 0.999e-3 / lam.sqrt()).unwrap();
        let b = extremal_z(3, lam, 1.001e-3 / lam.sqrt()).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-8);
        // outside the ball
        assert!(extremal_z(3, 1.0, 3.3).is_err());
    }

    #[test]
    fn sogge_exponent_values_and_continuity() {
        for n in 2..=6u32 {
            assert_eq!(sogge_delta(n, 2.0).unwrap(), 0.0);
            let bp = ExponentTable::new(n).delta_breakpoint();
            let below = sogge_delta(n, bp - 1e-9).unwrap();
            let above = sogge_delta(n, bp + 1e-9).unwrap();
            assert!((below - above).abs() < 1e-8);
            // exact continuity at the breakpoint itself
            let nf = n as f64;
            let b1 = (nf - 1.0) / 4.0 * (0.5 - 1.0 / bp);
            let b2 = nf / 2.0 * (0.5 - 1.0 / bp) - 0.25;
            assert!((b1 - b2).abs() < 1e-12);
        }
        assert_relative_eq!(sogge_delta(2, 6.0).unwrap(), 1.0 / 12.0, max_relative = 1e-14);
        assert!((sogge_delta(2, 1e9).unwrap() - 0.25).abs() < 1e-8);
        assert!(sogge_delta(2, 1.5).is_err());
    }

    #[test]
    fn smith_sogge_exponent_values() {
        let t3 = ExponentTable::new(3);
        assert_relative_eq!(t3.alpha_breakpoint(), 4.4, max_relative = 1e-14);
        let bp = t3.alpha_breakpoint();
        let b1 = smith_sogge_alpha(3, bp - 1e-12).unwrap();
        let b2 = smith_sogge_alpha(3, bp + 1e-12).unwrap();
        assert!((b1 - b2).abs() < 1e-12);
        // large-p limit is n/4 - 1/4
        assert!((smith_sogge_alpha(4, 1e9).unwrap() - 0.75).abs() < 1e-8);
        assert!(smith_sogge_alpha(2, 4.0).is_err());

        // above both breakpoints delta and alpha coincide identically
        for n in 3..=6u32 {
            let t = ExponentTable::new(n);
            let p = t.delta_breakpoint().max(t.alpha_breakpoint()) + 1.0;
            assert_eq!(sogge_delta(n, p).unwrap(), smith_sogge_alpha(n, p).unwrap());
        }
    }

    #[test]
    fn boundary_exponent_respects_range_restrictions() {
        assert!(boundary_extrema_exponent(3, 4.0).is_err());
        assert!(boundary_extrema_exponent(3, 5.0).is_ok());
        assert!(boundary_extrema_exponent(4, 3.9).is_err());
        let e = boundary_extrema_exponent(4, 4.0).unwrap();
        assert_relative_eq!(e, 2.0 + 8.0 * 0.25 - 1.0, max_relative = 1e-14);
    }

    #[test]
    fn lemma12_bound_values() {
        let b = lemma12_bound(3, 1e-12, 1.0).unwrap();
        assert_relative_eq!(b, 11.847687835088976, max_relative = 1e-9);
        // (1 - delta)^{3/2} sends the bound to zero as delta -> 1
        assert!(lemma12_bound(3, 0.999999, 1.0).unwrap() < 2e-8);
        assert!(lemma12_bound(2, 0.5, 1.0).is_err());
        // the Faber-Krahn constant in 3d is much larger, as expected of
        // the non-optimal superlevel constant
        let fk3 = (PI * PI).powf(1.5) * (4.0 * PI / 3.0);
        assert_relative_eq!(fk3, 4.0 * PI.powi(4) / 3.0, max_relative = 1e-12);
        assert!(fk3 > 10.0 * b);
    }

    #[test]
    fn chiti_inequality_strict_on_the_square() {
        let d = DomainSpec::rectangle(1.0, 1.0).with_resolution(64);
        let pairs = analytic_spectrum(&d, 1).unwrap();
        // p = 1 separates the square cleanly from the ball (true ratio
        // 0.9804); at p = 2 the strictness gap is only 0.39% (true ratio
        // 2 / (K_{2,2} sqrt(2) pi) = 0.99606), so only strictness itself
        // is asserted there
        let r1 = check_chiti_inequality(&pairs[0], 1.0).unwrap();
        assert!(r1.pass);
        assert!(
            r1.margin > 0.01 * r1.rhs,
            "p=1 margin {} rhs {}",
            r1.margin,
            r1.rhs
        );
        let r2 = check_chiti_inequality(&pairs[0], 2.0).unwrap();
        assert!(r2.pass);
        assert!(
            r2.margin > 0.002 * r2.rhs,
            "p=2 margin {} rhs {}",
            r2.margin,
            r2.rhs
        );
        let t = torus_sine_mode([2.0 * PI, 2.0 * PI], 1, 16).unwrap();
        assert!(check_chiti_inequality(&t, 2.0).is_err());
    }

    #[test]
    fn chiti_inequality_near_equality_on_the_disk() {
        let d = DomainSpec::disk(1.0).with_resolution(64);
        let pairs = analytic_spectrum(&d, 1).unwrap();
        for p in [1.0, 2.0] {
            let report = check_chiti_inequality(&pairs[0], p).unwrap();
            let ratio = report.lhs / report.rhs;
            assert!(
                (0.99..=1.0).contains(&ratio),
                "p={p}: ratio {ratio} out of the equality band"
            );
        }
    }

    #[test]
    fn extrema_sums_explicit_on_square_modes() {
        let d = DomainSpec::rectangle(PI, PI).with_resolution(48);
        let pairs = analytic_spectrum(&d, 20).unwrap();
        let decomps: Vec<_> = pairs
            .iter()
            .map(|p| decompose(p, crate::nodal::default_zero_tolerance(p).unwrap()).unwrap())
            .collect();
        for p in [1.0, 2.0] {
            let check =
                check_extrema_sums(&decomps, p, SumCheckMode::Explicit { grid_slack: 0.05 })
                    .unwrap();
            assert!(check.reports.iter().all(|r| r.pass), "p={p}");
            assert_eq!(check.reports.len(), 20);
        }
        // p=3 has no explicit constant
        assert!(
            check_extrema_sums(&decomps, 3.0, SumCheckMode::Explicit { grid_slack: 0.05 })
                .is_err()
        );
    }

    #[test]
    fn extrema_sums_fitted_on_torus_family() {
        let decomps: Vec<_> = (1..=8u32)
            .map(|m| {
                let pair = torus_sine_mode([2.0 * PI, 2.0 * PI], m, 24).unwrap();
                decompose(&pair, 1e-9).unwrap()
            })
            .collect();
        let check = check_extrema_sums(
            &decomps,
            1.0,
            SumCheckMode::Fitted {
                claimed_exponent: 1.0,
            },
        )
        .unwrap();
        let fit = check.fit.unwrap();
        // sum m = 4 m^2 = 2 lambda exactly: slope 1
        assert!((fit.slope - 1.0).abs() < 1e-9, "slope {}", fit.slope);
        assert_eq!(check.slope_within, Some(true));
        assert_relative_eq!(check.empirical_constant.unwrap(), 2.0, max_relative = 1e-9);

        let few = &decomps[..3];
        assert!(check_extrema_sums(
            few,
            1.0,
            SumCheckMode::Fitted {
                claimed_exponent: 1.0
            }
        )
        .is_err());
    }

    #[test]
    fn neumann_family_slopes() {
        let pairs = rectangle_neumann_modes(PI, PI, 40, 40).unwrap();
        let decomps: Vec<_> = pairs
            .iter()
            .map(|p| decompose(p, crate::nodal::default_zero_tolerance(p).unwrap()).unwrap())
            .collect();
        let check = check_neumann(&decomps).unwrap();
        assert!(check.sum_within, "sum slope {}", check.sum_fit.slope);
        assert!(check.sq_within, "sq slope {}", check.sq_fit.slope);
        assert!(
            (check.boundary_fit.slope - 0.5).abs() < 0.15,
            "boundary slope {}",
            check.boundary_fit.slope
        );
        // closed-form cross-check: cos(kx)cos(ly) has (k+1)(l+1) cells and
        // 2(k+l) of them touch the boundary when k,l >= 1
        for (mu, _sum, _sq, boundary) in &check.rows {
            if (*mu - 5.0).abs() < 1e-9 {
                assert_eq!(*boundary, 6); // (2,1): 2(2+1)
            }
        }
    }

    #[test]
    fn chain_inequality_holds_per_decomposition() {
        let d = DomainSpec::rectangle(PI, PI).with_resolution(48);
        let pairs = analytic_spectrum(&d, 8).unwrap();
        for pair in &pairs {
            let nd = decompose(pair, 1e-9).unwrap();
            for p in [1.0, 2.0, 4.0] {
                let (lhs, rhs) = extrema_chain_check(&nd, p).unwrap();
                assert!(
                    lhs <= rhs * (1.0 + 1e-12),
                    "p={p}, lambda={}: {lhs} > {rhs}",
                    pair.lambda
                );
            }
        }
    }

    #[test]
    fn fit_power_law_recovers_exact_slopes() {
        let pairs: Vec<(f64, f64)> = (1..=8)
            .map(|k| {
                let x = k as f64;
                (x, 3.0 * x.powf(1.7))
            })
            .collect();
        let fit = fit_power_law(&pairs).unwrap();
        assert_relative_eq!(fit.slope, 1.7, max_relative = 1e-12);
        assert!(fit.stderr < 1e-6);
        assert!(fit_power_law(&pairs[..4]).is_err());
        let bad = vec![(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (3.0, 1.0), (4.0, 1.0)];
        assert!(fit_power_law(&bad).is_err());
    }
}
