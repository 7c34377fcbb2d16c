//! Gauss-Legendre quadrature: fixed rules and an adaptive driver.

use crate::error::{Error, Result};

/// A Gauss-Legendre rule mapped to an interval (a, b).
///
/// Nodes are interior to the interval; weights are positive and sum to b - a.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    /// Rule with `order` points on (a, b); exact for polynomials of degree
    /// <= 2*order - 1.
    pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::domain("QuadratureRule", "order must be >= 1"));
        }
        if !(a < b) {
            return Err(Error::domain(
                "QuadratureRule",
                format!("need a < b, got a={a}, b={b}"),
            ));
        }
        let (xs, ws) = legendre_nodes(order);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        Ok(QuadratureRule {
            nodes: xs.iter().map(|x| mid + half * x).collect(),
            weights: ws.iter().map(|w| half * w).collect(),
            order,
        })
    }

    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Newton iteration on the Legendre polynomial recurrence; reference
/// nodes/weights on [-1, 1].
fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        ws[i] = w;
        xs[n - 1 - i] = x;
        ws[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        xs[n / 2] = 0.0;
    }
    (xs, ws)
}

fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const ADAPT_BASE_ORDER: usize = 10;
const MAX_DEPTH: usize = 60;

/// Adaptive Gauss-Legendre integration of `f` over [a, b] with estimated
/// error at most `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_with_error(f, a, b, tol).map(|(v, _)| v)
}

/// Same as [`integrate`] but also reports the accumulated error estimate.
pub fn integrate_with_error(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    if !(a < b) {
        return Err(Error::domain(
            "integrate",
            format!("need a < b, got a={a}, b={b}"),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("integrate", "tolerance must be positive"));
    }
    let panel = |lo: f64, hi: f64| -> f64 {
        let rule = QuadratureRule::gauss_legendre(ADAPT_BASE_ORDER, lo, hi)
            .expect("valid fixed-order rule");
        rule.apply(&f)
    };
    let whole = panel(a, b);
    let mut err = 0.0;
    let v = adapt(&panel, a, b, whole, tol, 0, &mut err)?;
    Ok((v, err))
}

fn adapt(
    panel: &impl Fn(f64, f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    err: &mut f64,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = panel(a, mid);
    let right = panel(mid, b);
    let refined = left + right;
    let delta = (refined - whole).abs();
    if delta <= 0.5 * tol || delta <= 1e-16 * refined.abs() {
        // the two-panel estimate carries the Richardson-scale error
        *err += delta / 1023.0;
        return Ok(refined);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::NonConvergence {
            op: "integrate",
            msg: format!("max subdivision depth on [{a}, {b}], delta={delta}"),
        });
    }
    let l = adapt(panel, a, mid, left, 0.5 * tol, depth + 1, err)?;
    let r = adapt(panel, mid, b, right, 0.5 * tol, depth + 1, err)?;
    Ok(l + r)
}
