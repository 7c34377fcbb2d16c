//! First Dirichlet eigenpairs of the p-Laplacian on intervals and disks,
//! computed by shooting on the radial ODE, plus the explicit `4^n` sup-norm
//! and nodal-count bound checks.
//!
//! Only first eigenpairs in one radial variable are produced; higher
//! p-Laplacian eigenfunctions and their nodal geometry are not modeled.

use crate::bounds::{BoundCheckReport, Provenance};
use crate::error::{Error, Result};

/// Sample count (cells) of the returned profiles.
const PROFILE_CELLS: usize = 1024;
/// Fixed integrator step relative to the domain length. The degenerate
/// gradient term punishes adaptive controllers near u' = 0; a fixed step on
/// the flux variable w = |u'|^{p-2} u' is robust.
const STEP_FRACTION: f64 = 1e-4;
/// Relative bisection width on lambda.
const LAMBDA_TOL: f64 = 1e-10;

/// Geometry of a radial p-Laplacian problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PLapGeometry {
    /// interval (0, length) in one dimension
    Interval { length: f64 },
    /// planar disk of the given radius, radial profiles
    Disk { radius: f64 },
}

impl PLapGeometry {
    pub fn dimension(&self) -> u32 {
        match self {
            PLapGeometry::Interval { .. } => 1,
            PLapGeometry::Disk { .. } => 2,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            PLapGeometry::Interval { length } => *length,
            PLapGeometry::Disk { radius } => std::f64::consts::PI * radius * radius,
        }
    }
}

/// Radial samples of a first eigenfunction with their measure weights.
#[derive(Debug, Clone)]
pub struct PLapProfile {
    /// abscissae from 0 to the domain extent
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    /// per-sample measure: trapezoid cells on an interval, `2 pi r` times
    /// that on the disk
    pub weights: Vec<f64>,
}

impl PLapProfile {
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        }
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(&v, &w)| v.abs().powf(p) * w)
            .sum::<f64>()
            .powf(1.0 / p)
    }

    pub fn sup(&self) -> f64 {
        self.lp_norm(f64::INFINITY)
    }
}

/// First Dirichlet eigenpair of the p-Laplacian, normalized to unit L^p.
#[derive(Debug, Clone)]
pub struct PLapEigenPair {
    pub p: f64,
    pub lambda: f64,
    pub geometry: PLapGeometry,
    pub profile: PLapProfile,
}

fn validate_p(p: f64, op: &'static str) -> Result<()> {
    if !(p > 1.0 && p <= 10.0) {
        return Err(Error::domain(op, format!("p must lie in (1, 10], got {p}")));
    }
    Ok(())
}

/// sign(t) |t|^e with the continuous extension through 0.
fn signed_pow(t: f64, e: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.signum() * t.abs().powf(e)
    }
}

/// Location of the first zero of the shooting solution on an interval,
/// integrating u(0) = 0, u'(0) = 1 with flux w = |u'|^{p-2} u':
///     u' = |w|^{p'-2} w,   w' = -lambda |u|^{p-2} u.
/// Returns `None` when no zero appears before `x_cap`.
fn interval_first_zero(p: f64, lambda: f64, dt: f64, x_cap: f64) -> Option<f64> {
    let pc = p / (p - 1.0);
    let du = |w: f64| signed_pow(w, pc - 2.0 + 1.0); // |w|^{p'-2} w
    let dw = |u: f64| -lambda * signed_pow(u, p - 2.0 + 1.0);

    let mut x = 0.0;
    let mut u = 0.0f64;
    let mut w = 1.0f64;
    let mut u_prev;
    let mut x_prev;
    let mut w_prev;
    while x < x_cap {
        u_prev = u;
        x_prev = x;
        w_prev = w;
        // classical RK4 on (u, w)
        let (k1u, k1w) = (du(w), dw(u));
        let (k2u, k2w) = (du(w + 0.5 * dt * k1w), dw(u + 0.5 * dt * k1u));
        let (k3u, k3w) = (du(w + 0.5 * dt * k2w), dw(u + 0.5 * dt * k2u));
        let (k4u, k4w) = (du(w + dt * k3w), dw(u + dt * k3u));
        u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        w += dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        x += dt;
        if x_prev > 0.0 && u <= 0.0 {
            return Some(refine_zero(
                x_prev,
                x,
                u_prev,
                du(w_prev),
                u,
                du(w),
            ));
        }
    }
    None
}

/// Hermite-cubic root of u between two integration nodes, given values and
/// derivatives at both ends.
fn refine_zero(x0: f64, x1: f64, u0: f64, du0: f64, u1: f64, du1: f64) -> f64 {
    let h = x1 - x0;
    // cubic in s over [0, 1]
    let eval = |s: f64| {
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * u0 + h10 * h * du0 + h01 * u1 + h11 * h * du1
    };
    // bisection on the cubic, which brackets the sign change by
    // construction
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if eval(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    x0 + 0.5 * (lo + hi) * h
}

/// Bisect lambda so the first zero of the shooting solution lands at
/// `target`; `first_zero(lambda)` must be decreasing in lambda.
fn bisect_eigenvalue(
    seed: f64,
    target: f64,
    mut first_zero: impl FnMut(f64) -> Option<f64>,
    op: &'static str,
) -> Result<f64> {
    // seed the bracket from the linear case and grow it geometrically
    // until it straddles the target
    let mut lo = 0.5 * seed;
    let mut hi = 4.0 * seed;
    let zero_past_target = |z: Option<f64>| z.map_or(true, |x| x > target);
    let mut grow = 0;
    while !zero_past_target(first_zero(lo)) {
        lo *= 0.5;
        grow += 1;
        if grow > 60 {
            return Err(Error::NonConvergence {
                op,
                msg: "lower bracket never overshoots the endpoint".into(),
            });
        }
    }
    grow = 0;
    while zero_past_target(first_zero(hi)) {
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(Error::NonConvergence {
                op,
                msg: "upper bracket never undershoots the endpoint".into(),
            });
        }
    }
    let mut width = hi - lo;
    while width > LAMBDA_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if zero_past_target(first_zero(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
        width = hi - lo;
    }
    Ok(0.5 * (lo + hi))
}

/// First Dirichlet eigenpair on (0, length): shoot on
/// `(|u'|^{p-2} u')' + lambda |u|^{p-2} u = 0` from u(0)=0, u'(0)=1 and
/// bisect lambda until the first zero lands at `length`.
pub fn sinp_eigenpair(p: f64, length: f64) -> Result<PLapEigenPair> {
    validate_p(p, "sinp_eigenpair")?;
    if !(length > 0.0) {
        return Err(Error::domain("sinp_eigenpair", "length must be positive"));
    }
    let dt = length * STEP_FRACTION;
    let cap = 8.0 * length;
    let seed = (std::f64::consts::PI / length).powi(2);
    let lambda = bisect_eigenvalue(
        seed,
        length,
        |lam| interval_first_zero(p, lam, dt, cap),
        "sinp_eigenpair",
    )?;

    // integrate once more at the final lambda and sample the profile
    let pc = p / (p - 1.0);
    let du = |w: f64| signed_pow(w, pc - 1.0);
    let dw = |u: f64| -lambda * signed_pow(u, p - 1.0);
    let n_steps = PROFILE_CELLS;
    let h = length / n_steps as f64;
    let sub = (h / dt).ceil() as usize;
    let hs = h / sub as f64;
    let mut values = vec![0.0f64; n_steps + 1];
    let mut u = 0.0f64;
    let mut w = 1.0f64;
    for value in values.iter_mut().skip(1) {
        for _ in 0..sub {
            let (k1u, k1w) = (du(w), dw(u));
            let (k2u, k2w) = (du(w + 0.5 * hs * k1w), dw(u + 0.5 * hs * k1u));
            let (k3u, k3w) = (du(w + 0.5 * hs * k2w), dw(u + 0.5 * hs * k2u));
            let (k4u, k4w) = (du(w + hs * k3w), dw(u + hs * k3u));
            u += hs / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            w += hs / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        }
        *value = u.max(0.0);
    }
    values[n_steps] = 0.0;
    let xs: Vec<f64> = (0..=n_steps).map(|i| i as f64 * h).collect();
    let weights: Vec<f64> = (0..=n_steps)
        .map(|i| if i == 0 || i == n_steps { 0.5 * h } else { h })
        .collect();
    finish_pair(p, lambda, PLapGeometry::Interval { length }, xs, values, weights)
}

/// First radial Dirichlet eigenpair on the planar disk: shoot on
/// `(r |u'|^{p-2} u')' + lambda r |u|^{p-2} u = 0` from u(0)=1, u'(0)=0.
pub fn radial_plap_eigenpair(p: f64, radius: f64) -> Result<PLapEigenPair> {
    validate_p(p, "radial_plap_eigenpair")?;
    if !(radius > 0.0) {
        return Err(Error::domain(
            "radial_plap_eigenpair",
            "radius must be positive",
        ));
    }
    let dt = radius * STEP_FRACTION;
    let cap = 8.0 * radius;
    // linear-case seed: lambda_1 of the disk scaled by 1/R^2
    let j0 = crate::specfun::bessel_first_zero(crate::specfun::BesselOrder::new(0.0)?)?;
    let seed = (j0 / radius).powi(2);

    let shoot = |lam: f64| radial_first_zero(p, lam, dt, cap);
    let lambda = bisect_eigenvalue(seed, radius, shoot, "radial_plap_eigenpair")?;

    // final pass for the profile
    let n_steps = PROFILE_CELLS;
    let h = radius / n_steps as f64;
    let sub = (h / dt).ceil() as usize;
    let hs = h / sub as f64;
    let mut values = vec![0.0f64; n_steps + 1];
    values[0] = 1.0;
    let mut state = RadialState::start(p, lambda, hs);
    for (i, value) in values.iter_mut().enumerate().skip(1) {
        let target = i as f64 * h;
        state.advance_to(target);
        *value = state.u.max(0.0);
    }
    values[n_steps] = 0.0;
    let xs: Vec<f64> = (0..=n_steps).map(|i| i as f64 * h).collect();
    let weights: Vec<f64> = xs
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let cell = if i == 0 || i == n_steps { 0.5 * h } else { h };
            2.0 * std::f64::consts::PI * r * cell
        })
        .collect();
    finish_pair(p, lambda, PLapGeometry::Disk { radius }, xs, values, weights)
}

/// Radial shooting state; the flux is `w = r |u'|^{p-2} u'`, with series
/// start `w ~ -lambda r^2 / 2` near the center.
struct RadialState {
    p: f64,
    lambda: f64,
    dt: f64,
    r: f64,
    u: f64,
    w: f64,
}

impl RadialState {
    fn start(p: f64, lambda: f64, dt: f64) -> Self {
        let r0 = dt * 1e-3;
        RadialState {
            p,
            lambda,
            dt,
            r: r0,
            u: 1.0,
            w: -lambda * r0 * r0 / 2.0,
        }
    }

    fn derivs(&self, r: f64, u: f64, w: f64) -> (f64, f64) {
        let pc = self.p / (self.p - 1.0);
        let r_safe = r.max(1e-300);
        let du = signed_pow(w / r_safe, pc - 1.0);
        let dw = -self.lambda * r * signed_pow(u, self.p - 1.0);
        (du, dw)
    }

    fn step(&mut self, dt: f64) {
        let (k1u, k1w) = self.derivs(self.r, self.u, self.w);
        let (k2u, k2w) = self.derivs(
            self.r + 0.5 * dt,
            self.u + 0.5 * dt * k1u,
            self.w + 0.5 * dt * k1w,
        );
        let (k3u, k3w) = self.derivs(
            self.r + 0.5 * dt,
            self.u + 0.5 * dt * k2u,
            self.w + 0.5 * dt * k2w,
        );
        let (k4u, k4w) = self.derivs(self.r + dt, self.u + dt * k3u, self.w + dt * k3w);
        self.u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        self.w += dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        self.r += dt;
    }

    fn advance_to(&mut self, target: f64) {
        while self.r + self.dt <= target {
            self.step(self.dt);
        }
        let rest = target - self.r;
        if rest > 1e-15 {
            self.step(rest);
        }
    }
}

fn radial_first_zero(p: f64, lambda: f64, dt: f64, r_cap: f64) -> Option<f64> {
    let mut state = RadialState::start(p, lambda, dt);
    while state.r < r_cap {
        let r_prev = state.r;
        let u_prev = state.u;
        let (du_prev, _) = state.derivs(state.r, state.u, state.w);
        state.step(dt);
        if state.u <= 0.0 {
            let (du_now, _) = state.derivs(state.r, state.u, state.w);
            return Some(refine_zero(r_prev, state.r, u_prev, du_prev, state.u, du_now));
        }
    }
    None
}

fn finish_pair(
    p: f64,
    lambda: f64,
    geometry: PLapGeometry,
    xs: Vec<f64>,
    mut values: Vec<f64>,
    weights: Vec<f64>,
) -> Result<PLapEigenPair> {
    // normalize to unit L^p
    let norm = values
        .iter()
        .zip(&weights)
        .map(|(&v, &w)| v.abs().powf(p) * w)
        .sum::<f64>()
        .powf(1.0 / p);
    if !(norm > 0.0) {
        return Err(Error::ZeroField("plap profile"));
    }
    values.iter_mut().for_each(|v| *v /= norm);
    let interior_positive = values[1..values.len() - 1].iter().all(|&v| v > 0.0);
    if !interior_positive {
        return Err(Error::NonConvergence {
            op: "plap shooting",
            msg: "profile is not positive in the interior".into(),
        });
    }
    Ok(PLapEigenPair {
        p,
        lambda,
        geometry,
        profile: PLapProfile {
            xs,
            values,
            weights,
        },
    })
}

/// `||u||_inf <= 4^n Vol^{1-1/p} lambda^{n/p}` for a unit-L^p first
/// eigenfunction. The `4^n` constant is generous, so the report also
/// carries plenty of slack (`rhs / lhs`) when the pipeline is healthy.
pub fn check_lindqvist(pair: &PLapEigenPair, n: u32, domain_volume: f64) -> Result<BoundCheckReport> {
    if n != pair.geometry.dimension() {
        return Err(Error::domain(
            "check_lindqvist",
            format!(
                "dimension {n} does not match the {}-d geometry",
                pair.geometry.dimension()
            ),
        ));
    }
    let norm_p = pair.profile.lp_norm(pair.p);
    if (norm_p - 1.0).abs() > 1e-8 {
        return Err(Error::domain(
            "check_lindqvist",
            format!("profile must be unit L^p, got {norm_p}"),
        ));
    }
    let lhs = pair.profile.sup();
    let rhs = 4f64.powi(n as i32)
        * domain_volume.powf(1.0 - 1.0 / pair.p)
        * pair.lambda.powf(n as f64 / pair.p);
    Ok(BoundCheckReport::new(
        "p-laplacian-sup-bound",
        pair.lambda,
        lhs,
        rhs,
        Provenance::Explicit,
    ))
}

/// Count of nodal extrema at least `a`, with its explicit upper bound
/// `4^n Vol^{1-1/p} a^{-1} lambda^{n/p}`.
pub fn count_bound_plap(
    m_values: &[f64],
    a: f64,
    lambda: f64,
    n: u32,
    p: f64,
    domain_volume: f64,
) -> Result<(usize, f64)> {
    if !(a > 0.0) {
        return Err(Error::domain("count_bound_plap", "a must be positive"));
    }
    let count = m_values.iter().filter(|&&m| m >= a).count();
    let bound = 4f64.powi(n as i32)
        * domain_volume.powf(1.0 - 1.0 / p)
        * lambda.powf(n as f64 / p)
        / a;
    Ok((count, bound))
}
