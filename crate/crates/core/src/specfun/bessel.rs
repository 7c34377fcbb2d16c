//! Bessel functions of the first kind with real order, and their zeros.
//!
//! Two evaluation regimes: the ascending power series for small arguments and
//! a Miller-style backward recurrence for the rest, normalized by the
//! Neumann-series identity `(x/2)^v = sum_k (v+2k) Gamma(v+k)/k! J_{v+2k}(x)`.

use super::gamma::{gamma, ln_gamma};
use crate::error::{Error, Result};

/// Crossover between the power-series and backward-recurrence regimes.
const SERIES_CUTOFF: f64 = 12.0;

/// Order of a Bessel function of the first kind, `J_nu` with `nu >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder {
    nu: f64,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::domain(
                "BesselOrder::new",
                format!("order must be finite and nonnegative, got {nu}"),
            ));
        }
        Ok(BesselOrder { nu })
    }

    /// Order for the radial profile in dimension `n`, i.e. `nu = n/2 - 1`.
    pub fn for_dimension(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(
                "BesselOrder::for_dimension",
                format!("dimension must be >= 2, got {n}"),
            ));
        }
        BesselOrder::new(n as f64 / 2.0 - 1.0)
    }

    pub fn value(&self) -> f64 {
        self.nu
    }
}

/// J_nu(x) for x >= 0, relative error <= 1e-12 for x <= 50.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    let nu = order.value();
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(
            "bessel_j",
            format!("argument must be finite and nonnegative, got {x}"),
        ));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x <= SERIES_CUTOFF {
        Ok(series_j(nu, x))
    } else {
        Ok(miller_j(nu, x))
    }
}

/// dJ_nu/dx, from the recurrences J'_nu = J_{nu-1} - (nu/x) J_nu for
/// nu >= 1 and J'_nu = (nu/x) J_nu - J_{nu+1} below.
pub fn bessel_j_prime(order: BesselOrder, x: f64) -> Result<f64> {
    let nu = order.value();
    let here = bessel_j(order, x)?;
    if nu >= 1.0 {
        let below = bessel_j(BesselOrder::new(nu - 1.0)?, x)?;
        Ok(below - nu / x * here)
    } else {
        let above = bessel_j(BesselOrder::new(nu + 1.0)?, x)?;
        Ok(if nu == 0.0 { -above } else { nu / x * here - above })
    }
}

fn series_j(nu: f64, x: f64) -> f64 {
    // leading term (x/2)^nu / Gamma(nu+1), in log space to dodge overflow
    // for large orders
    let mut term = (nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)).exp();
    let q = 0.25 * x * x;
    let mut sum = term;
    for k in 0..400u32 {
        let kf = k as f64;
        term *= -q / ((kf + 1.0) * (nu + kf + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn miller_j(nu: f64, x: f64) -> f64 {
    let m = nu.floor() as usize;
    let frac = nu - m as f64;
    let top = x.ceil().max(nu.ceil()) as usize + 1;
    let start = top + 24 + (5.0 * (top as f64).sqrt()).ceil() as usize;

    // downward recurrence from a tiny seed; the unwanted solution decays
    let mut vals = vec![0.0f64; start + 2];
    vals[start + 1] = 0.0;
    vals[start] = 1e-30;
    for k in (1..=start).rev() {
        let v = 2.0 * (frac + k as f64) / x * vals[k] - vals[k + 1];
        vals[k - 1] = v;
        if v.abs() > 1e250 {
            for w in vals[k - 1..].iter_mut() {
                *w *= 1e-250;
            }
        }
    }

    // normalization: sum_k (frac+2k) Gamma(frac+k)/k! * vals[2k]
    // = sigma * (x/2)^frac, where sigma is the unknown seed scale.
    // g_k = Gamma(frac+k)/k! built incrementally; the k = 0 coefficient
    // degenerates to Gamma(frac+1).
    let mut sum = gamma(frac + 1.0) * vals[0];
    let mut g = gamma(frac + 1.0); // g_1 = Gamma(frac+1)/1!
    let mut k = 1usize;
    while 2 * k <= start {
        sum += (frac + 2.0 * k as f64) * g * vals[2 * k];
        g *= (frac + k as f64) / (k as f64 + 1.0);
        k += 1;
    }
    vals[m] * (0.5 * x).powf(frac) / sum
}

/// First positive zero j_nu of J_nu, for 0 <= nu <= 10.
///
/// Sign-bracketing on [nu+1, nu+10], bisection, then two Newton steps.
pub fn bessel_first_zero(order: BesselOrder) -> Result<f64> {
    let nu = order.value();
    if nu > 10.0 {
        return Err(Error::domain(
            "bessel_first_zero",
            format!("order must be <= 10, got {nu}"),
        ));
    }
    let lo = nu + 1.0;
    let hi = nu + 10.0;
    refine_zero_in(order, lo, hi, "bessel_first_zero")
}

/// First `count` positive zeros j_{nu,s}, s = 1..=count.
///
/// McMahon's expansion seeds each bracket; used to enumerate disk modes.
pub fn bessel_zeros(order: BesselOrder, count: usize) -> Result<Vec<f64>> {
    let nu = order.value();
    let mut zeros = Vec::with_capacity(count);
    let mut prev = 0.0f64;
    for s in 1..=count {
        let mu = 4.0 * nu * nu;
        let beta = (s as f64 + 0.5 * nu - 0.25) * std::f64::consts::PI;
        let guess = beta - (mu - 1.0) / (8.0 * beta);
        let lo = (guess - 1.2).max(prev + 1e-6).max(nu * 1e-12);
        let hi = guess + 1.2;
        let z = refine_zero_in(order, lo, hi, "bessel_zeros")?;
        prev = z;
        zeros.push(z);
    }
    Ok(zeros)
}

fn refine_zero_in(order: BesselOrder, lo: f64, hi: f64, op: &'static str) -> Result<f64> {
    const SCAN: usize = 256;
    let step = (hi - lo) / SCAN as f64;
    let mut a = lo;
    let mut fa = bessel_j(order, a)?;
    let mut bracket = None;
    for i in 1..=SCAN {
        let b = lo + i as f64 * step;
        let fb = bessel_j(order, b)?;
        if fa == 0.0 {
            return Ok(a);
        }
        if fa * fb < 0.0 {
            bracket = Some((a, b, fa));
            break;
        }
        a = b;
        fa = fb;
    }
    let (mut a, mut b, mut fa) = bracket.ok_or(Error::NoSignChange { op, lo, hi })?;
    // bisection down past 1e-12, then polish with Newton
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        let fm = bessel_j(order, mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
        if b - a < 1e-13 * b.max(1.0) {
            break;
        }
    }
    let mut z = 0.5 * (a + b);
    for _ in 0..2 {
        let f = bessel_j(order, z)?;
        let fp = bessel_j_prime(order, z)?;
        if fp != 0.0 {
            z -= f / fp;
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn ord(nu: f64) -> BesselOrder {
        BesselOrder::new(nu).unwrap()
    }

    /// Truncated power series evaluated with simple summation; slow but
    /// independent of the production evaluation paths.
    fn series_oracle(nu: f64, x: f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..120 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let ln_t = (2.0 * k as f64 + nu) * (0.5 * x).ln()
                - ln_gamma(k as f64 + 1.0)
                - ln_gamma(nu + k as f64 + 1.0);
            sum += sign * ln_t.exp();
        }
        sum
    }

    #[test]
    fn half_order_at_pi_vanishes() {
        // J_{1/2}(x) = sqrt(2/(pi x)) sin x
        let v = bessel_j(ord(0.5), PI).unwrap();
        assert!(v.abs() < 1e-14, "J_1/2(pi) = {v}");
    }

    #[test]
    fn order_zero_at_origin_is_one() {
        assert_eq!(bessel_j(ord(0.0), 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(ord(2.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn j0_near_its_first_root() {
        // root of the truncated power series, found by bisection offline
        let v = bessel_j(ord(0.0), 2.404826).unwrap();
        assert!(v.abs() < 1e-6, "J_0(2.404826) = {v}");
    }

    #[test]
    fn half_order_closed_form_on_range() {
        // J_{1/2}(x) = sqrt(2/(pi x)) sin(x) within 1e-10 on [0.1, 30]
        let mut x = 0.1;
        while x <= 30.0 {
            let want = (2.0 / (PI * x)).sqrt() * x.sin();
            let got = bessel_j(ord(0.5), x).unwrap();
            assert!(
                (got - want).abs() <= 1e-10 * want.abs().max(1.0),
                "x={x}: got {got}, want {want}"
            );
            x += 0.37;
        }
    }

    /// Integral representation for integer orders, evaluated by Simpson's
    /// rule; independent of both production paths.
    fn integral_oracle(n: u32, x: f64) -> f64 {
        let m = 40_000;
        let h = PI / m as f64;
        let f = |theta: f64| (n as f64 * theta - x * theta.sin()).cos();
        let mut sum = f(0.0) + f(PI);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(i as f64 * h);
        }
        sum * h / (3.0 * PI)
    }

    #[test]
    fn series_and_miller_agree_across_the_cutoff() {
        // the log-space oracle summation carries cancellation noise that
        // grows quickly past x ~ 13, so this is a path-agreement check
        // around the cutoff, not a precision one
        for &nu in &[0.0, 0.5, 1.0, 1.5, 2.0, 3.5, 7.0] {
            for &x in &[11.0, 11.9, 12.1, 12.5, 13.0] {
                let got = bessel_j(ord(nu), x).unwrap();
                let want = series_oracle(nu, x);
                assert!(
                    (got - want).abs() <= 1e-9,
                    "nu={nu}, x={x}: got {got}, oracle {want}"
                );
            }
        }
    }

    #[test]
    fn both_paths_match_integral_oracle_for_integer_orders() {
        for &n in &[0u32, 1, 2, 5, 9] {
            for &x in &[2.0, 5.0, 11.0, 15.0, 25.0, 35.0, 50.0] {
                let got = bessel_j(ord(n as f64), x).unwrap();
                let want = integral_oracle(n, x);
                assert!(
                    (got - want).abs() <= 1e-12 * want.abs().max(1e-2),
                    "n={n}, x={x}: got {got}, oracle {want}"
                );
            }
        }
    }

    #[test]
    fn both_paths_match_half_integer_closed_forms() {
        for &x in &[2.0, 5.0, 11.0, 15.0, 25.0, 35.0, 50.0] {
            let pref = (2.0 / (PI * x)).sqrt();
            let want_12 = pref * x.sin();
            let want_32 = pref * (x.sin() / x - x.cos());
            let want_52 = pref * ((3.0 / (x * x) - 1.0) * x.sin() - 3.0 * x.cos() / x);
            for (nu, want) in [(0.5, want_12), (1.5, want_32), (2.5, want_52)] {
                let got = bessel_j(ord(nu), x).unwrap();
                assert!(
                    (got - want).abs() <= 1e-12 * want.abs().max(1e-2),
                    "nu={nu}, x={x}: got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn first_zeros_match_bisection_oracle() {
        // oracles located by bisection on the series evaluation
        let cases = [
            (0.0, 2.404825557695773),
            (0.5, PI),
            (1.0, 3.831705970207512),
            (1.5, 4.493409457909064),
            (2.0, 5.135622301840683),
        ];
        for (nu, want) in cases {
            let z = bessel_first_zero(ord(nu)).unwrap();
            assert!((z - want).abs() < 1e-10, "nu={nu}: got {z}, want {want}");
            let residual = bessel_j(ord(nu), z).unwrap();
            assert!(residual.abs() < 1e-9, "nu={nu}: J(j_nu) = {residual}");
        }
    }

    #[test]
    fn zero_table_is_increasing_and_consistent() {
        for &nu in &[0.0, 1.0, 2.5, 6.0] {
            let zs = bessel_zeros(ord(nu), 8).unwrap();
            for w in zs.windows(2) {
                assert!(w[1] > w[0] + 1.0);
            }
            for &z in &zs {
                assert!(bessel_j(ord(nu), z).unwrap().abs() < 1e-9);
            }
        }
        let first = bessel_zeros(ord(0.0), 1).unwrap()[0];
        assert_relative_eq!(
            first,
            bessel_first_zero(ord(0.0)).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_invalid_arguments() {
        assert!(BesselOrder::new(-1.0).is_err());
        assert!(BesselOrder::new(f64::NAN).is_err());
        assert!(bessel_j(ord(1.0), -0.5).is_err());
        assert!(bessel_first_zero(ord(11.0)).is_err());
    }
}
