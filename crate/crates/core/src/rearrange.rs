//! Discrete rearrangement machinery: distribution functions, decreasing
//! rearrangements, the bathtub maximizer for decreasing radial profiles,
//! the Hardy-Littlewood product inequality, and the sup bound on the
//! Newtonian potential of a set of prescribed volume.
//!
//! Everything acts on weighted samples so the same code paths serve the
//! grid fields produced by the spectra module. All functions are pure; the
//! Monte-Carlo estimator takes an explicit seed.

use crate::error::{Error, Result};
use crate::specfun::unit_ball_volume;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Magnitude samples `|u|` with per-cell measure weights.
#[derive(Debug, Clone)]
pub struct WeightedSamples {
    values: Vec<f64>,
    weights: Vec<f64>,
    total_measure: f64,
}

impl WeightedSamples {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::LayoutMismatch {
                msg: format!("{} values vs {} weights", values.len(), weights.len()),
            });
        }
        if values.is_empty() {
            return Err(Error::domain("WeightedSamples::new", "empty sample set"));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::domain(
                "WeightedSamples::new",
                "weights must be positive",
            ));
        }
        let total_measure = weights.iter().sum();
        Ok(WeightedSamples {
            values,
            weights,
            total_measure,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Distribution function `mu(t)`: total weight where the value exceeds `t`.
///
/// Right-continuous and non-increasing in `t`.
pub fn distribution_function(s: &WeightedSamples, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(
            "distribution_function",
            format!("threshold must be >= 0, got {t}"),
        ));
    }
    Ok(s.values
        .iter()
        .zip(&s.weights)
        .filter(|(&v, _)| v > t)
        .map(|(_, &w)| w)
        .sum())
}

/// The decreasing rearrangement `u*` as a step function on
/// `[0, total_measure]`.
#[derive(Debug, Clone)]
pub struct DecreasingRearrangement {
    /// (value, weight) steps, values non-increasing. Ties in value keep the
    /// original sample order so the construction is deterministic.
    steps: Vec<(f64, f64)>,
    total_measure: f64,
}

impl DecreasingRearrangement {
    /// `u*(sigma) = inf { t : mu(t) < sigma }`; `u*(0)` is the max value.
    pub fn eval(&self, sigma: f64) -> f64 {
        if sigma <= 0.0 {
            return self.steps[0].0;
        }
        let mut acc = 0.0;
        for &(v, w) in &self.steps {
            acc += w;
            if sigma <= acc {
                return v;
            }
        }
        self.steps[self.steps.len() - 1].0
    }

    /// `(value, weight)` steps in non-increasing value order.
    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    /// Integral of the step function over its whole domain.
    pub fn integral(&self) -> f64 {
        self.steps.iter().map(|&(v, w)| v * w).sum()
    }
}

/// Sort samples by descending value (ties broken by original index).
pub fn decreasing_rearrangement(s: &WeightedSamples) -> DecreasingRearrangement {
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&a, &b| {
        s.values[b]
            .partial_cmp(&s.values[a])
            .expect("finite sample values")
            .then(a.cmp(&b))
    });
    DecreasingRearrangement {
        steps: idx.into_iter().map(|i| (s.values[i], s.weights[i])).collect(),
        total_measure: s.total_measure,
    }
}

/// A nonnegative strictly decreasing function of the distance to a fixed
/// center.
pub struct RadialProfile<F: Fn(f64) -> f64> {
    func: F,
}

impl<F: Fn(f64) -> f64> RadialProfile<F> {
    pub fn new(func: F) -> Self {
        RadialProfile { func }
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.func)(r)
    }
}

/// Greedy maximizer of `sum f(distance) * weight` over subsets of prescribed
/// measure: take cells in increasing distance, the last one fractionally.
///
/// The fractional last cell makes this the exact optimum of the continuous
/// knapsack relaxation, so it dominates every subset of equal measure.
/// Returns `(value, selected_measure)`.
pub fn bathtub_supremum<F: Fn(f64) -> f64>(
    profile: &RadialProfile<F>,
    samples: &[(f64, f64)],
    capacity: f64,
) -> Result<(f64, f64)> {
    let total: f64 = samples.iter().map(|&(_, w)| w).sum();
    if capacity > total * (1.0 + 1e-12) {
        return Err(Error::CapacityExceeded {
            requested: capacity,
            available: total,
        });
    }
    if !(capacity >= 0.0) {
        return Err(Error::domain("bathtub_supremum", "capacity must be >= 0"));
    }
    let mut idx: Vec<usize> = (0..samples.len()).collect();
    idx.sort_by(|&a, &b| {
        samples[a]
            .0
            .partial_cmp(&samples[b].0)
            .expect("finite distances")
            .then(a.cmp(&b))
    });

    let capacity = capacity.min(total);
    let mut remaining = capacity;
    let mut value = 0.0;
    let mut taken = 0.0;
    let mut prev: Option<(f64, f64)> = None; // (distance, f value)
    for &i in &idx {
        if remaining <= 0.0 {
            break;
        }
        let (d, w) = samples[i];
        let fv = profile.eval(d);
        if let Some((pd, pf)) = prev {
            // equal values at nearly tied distances are rounding, not a
            // monotonicity violation
            if d > pd && fv > pf {
                return Err(Error::domain(
                    "bathtub_supremum",
                    format!("profile not decreasing: f({pd})={pf} vs f({d})={fv}"),
                ));
            }
        }
        prev = Some((d, fv));
        let take = w.min(remaining);
        value += fv * take;
        taken += take;
        remaining -= take;
    }
    Ok((value, taken))
}

/// Hardy-Littlewood check: `(sum u v w, integral of u* v*)`.
///
/// The contract is `lhs <= rhs` (up to roundoff); both samples must share
/// one layout (same length and identical weights).
pub fn hardy_littlewood_check(u: &WeightedSamples, v: &WeightedSamples) -> Result<(f64, f64)> {
    if u.len() != v.len() {
        return Err(Error::LayoutMismatch {
            msg: format!("{} vs {} samples", u.len(), v.len()),
        });
    }
    if u.weights
        .iter()
        .zip(&v.weights)
        .any(|(&a, &b)| (a - b).abs() > 1e-12 * a.abs().max(b.abs()))
    {
        return Err(Error::LayoutMismatch {
            msg: "weights differ between the two sample sets".to_string(),
        });
    }
    let lhs = u
        .values
        .iter()
        .zip(&v.values)
        .zip(&u.weights)
        .map(|((&a, &b), &w)| a * b * w)
        .sum();

    // integral of the aligned product of the two step functions
    let ur = decreasing_rearrangement(u);
    let vr = decreasing_rearrangement(v);
    let mut rhs = 0.0;
    let mut iu = 0;
    let mut iv = 0;
    let mut left_u = ur.steps[0].1;
    let mut left_v = vr.steps[0].1;
    loop {
        let seg = left_u.min(left_v);
        rhs += ur.steps[iu].0 * vr.steps[iv].0 * seg;
        left_u -= seg;
        left_v -= seg;
        if left_u <= 0.0 {
            iu += 1;
            if iu == ur.steps.len() {
                break;
            }
            left_u = ur.steps[iu].1;
        }
        if left_v <= 0.0 {
            iv += 1;
            if iv == vr.steps.len() {
                break;
            }
            left_v = vr.steps[iv].1;
        }
    }
    Ok((lhs, rhs))
}

/// Sup bound for the Newtonian potential of the indicator of a region of
/// volume `region_volume` in dimension `n >= 3`:
/// `Vol^{2/n} / (2 (n-2) alpha_n^{2/n})`.
pub fn newtonian_potential_sup(n: u32, region_volume: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain(
            "newtonian_potential_sup",
            format!("bound only holds for n >= 3, got {n}"),
        ));
    }
    if !(region_volume > 0.0) {
        return Err(Error::domain(
            "newtonian_potential_sup",
            "region volume must be positive",
        ));
    }
    let alpha = unit_ball_volume(n)?;
    let e = 2.0 / n as f64;
    Ok(region_volume.powf(e) / (2.0 * (n as f64 - 2.0) * alpha.powf(e)))
}

/// Default sample count for the Monte-Carlo potential estimator; 1%
/// estimator error at desk runtime.
pub const POTENTIAL_MC_SAMPLES: usize = 200_000;

/// A 3-d region with exactly known volume and direct uniform sampling.
#[derive(Debug, Clone)]
pub enum PotentialRegion {
    Ball { center: [f64; 3], radius: f64 },
    Cuboid { corner: [f64; 3], sides: [f64; 3] },
    Ellipsoid { center: [f64; 3], semi_axes: [f64; 3] },
}

impl PotentialRegion {
    pub fn volume(&self) -> f64 {
        match self {
            PotentialRegion::Ball { radius, .. } => 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3),
            PotentialRegion::Cuboid { sides, .. } => sides[0] * sides[1] * sides[2],
            PotentialRegion::Ellipsoid { semi_axes, .. } => {
                4.0 / 3.0 * std::f64::consts::PI * semi_axes[0] * semi_axes[1] * semi_axes[2]
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> [f64; 3] {
        match self {
            PotentialRegion::Ball { center, radius } => {
                let u = unit_ball_point(rng);
                [
                    center[0] + radius * u[0],
                    center[1] + radius * u[1],
                    center[2] + radius * u[2],
                ]
            }
            PotentialRegion::Cuboid { corner, sides } => [
                corner[0] + sides[0] * rng.gen::<f64>(),
                corner[1] + sides[1] * rng.gen::<f64>(),
                corner[2] + sides[2] * rng.gen::<f64>(),
            ],
            PotentialRegion::Ellipsoid { center, semi_axes } => {
                let u = unit_ball_point(rng);
                [
                    center[0] + semi_axes[0] * u[0],
                    center[1] + semi_axes[1] * u[1],
                    center[2] + semi_axes[2] * u[2],
                ]
            }
        }
    }
}

fn unit_ball_point(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let p = [
            2.0 * rng.gen::<f64>() - 1.0,
            2.0 * rng.gen::<f64>() - 1.0,
            2.0 * rng.gen::<f64>() - 1.0,
        ];
        if p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= 1.0 {
            return p;
        }
    }
}

/// Monte-Carlo estimate of the Newtonian potential of the region indicator
/// at `x0` in three dimensions: `integral of |x0 - y|^{-1} / (4 pi)` over
/// the region.
pub fn newtonian_potential_mc(
    region: &PotentialRegion,
    x0: [f64; 3],
    samples: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vol = region.volume();
    let mut acc = 0.0;
    for _ in 0..samples {
        let y = region.sample(&mut rng);
        let r = ((x0[0] - y[0]).powi(2) + (x0[1] - y[1]).powi(2) + (x0[2] - y[2]).powi(2))
            .sqrt()
            .max(1e-12);
        acc += 1.0 / r;
    }
    vol * acc / (4.0 * std::f64::consts::PI * samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn samples(values: &[f64], weights: &[f64]) -> WeightedSamples {
        WeightedSamples::new(values.to_vec(), weights.to_vec()).unwrap()
    }

    #[test]
    fn distribution_counts_weights_above_threshold() {
        let s = samples(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]);
        assert_eq!(distribution_function(&s, 1.5).unwrap(), 2.0);
        assert_eq!(distribution_function(&s, 3.0).unwrap(), 0.0);
        assert_eq!(distribution_function(&s, 5.0).unwrap(), 0.0);

        let c = samples(&[0.5; 4], &[0.25; 4]);
        assert_eq!(distribution_function(&c, 0.0).unwrap(), 1.0);
        assert!(distribution_function(&c, -1.0).is_err());
    }

    #[test]
    fn rearrangement_sorts_descending() {
        let s = samples(&[3.0, 1.0, 2.0], &[1.0, 1.0, 1.0]);
        let r = decreasing_rearrangement(&s);
        assert_eq!(r.steps(), &[(3.0, 1.0), (2.0, 1.0), (1.0, 1.0)]);
        assert_eq!(r.eval(0.0), 3.0);
        assert_eq!(r.eval(0.5), 3.0);
        assert_eq!(r.eval(1.5), 2.0);
        assert_eq!(r.eval(3.0), 1.0);
    }

    #[test]
    fn rearrangement_of_constant_is_constant() {
        let s = samples(&[0.7; 5], &[0.2, 0.3, 0.1, 0.25, 0.15]);
        let r = decreasing_rearrangement(&s);
        assert!(r.steps().iter().all(|&(v, _)| v == 0.7));
        assert_relative_eq!(r.total_measure(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn bathtub_full_capacity_takes_everything() {
        let pts = [(0.5, 1.0), (1.0, 2.0), (2.0, 0.5)];
        let f = RadialProfile::new(|r: f64| 1.0 / r);
        let total: f64 = pts.iter().map(|&(_, w)| w).sum();
        let (v, m) = bathtub_supremum(&f, &pts, total).unwrap();
        let want: f64 = pts.iter().map(|&(d, w)| w / d).sum();
        assert_relative_eq!(v, want, max_relative = 1e-14);
        assert_relative_eq!(m, total, max_relative = 1e-14);
    }

    #[test]
    fn bathtub_small_capacity_takes_nearest_cell() {
        let pts = [(2.0, 0.5), (0.5, 1.0), (1.0, 2.0)];
        let f = RadialProfile::new(|r: f64| 1.0 / r);
        let (v, m) = bathtub_supremum(&f, &pts, 1.0).unwrap();
        assert_relative_eq!(v, 1.0 / 0.5, max_relative = 1e-14);
        assert_relative_eq!(m, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn bathtub_rejects_overfull_and_increasing_profiles() {
        let pts = [(0.5, 1.0), (1.0, 1.0)];
        let f = RadialProfile::new(|r: f64| 1.0 / r);
        assert!(bathtub_supremum(&f, &pts, 3.0).is_err());
        let g = RadialProfile::new(|r: f64| r);
        assert!(bathtub_supremum(&g, &pts, 1.5).is_err());
    }

    #[test]
    fn hardy_littlewood_equality_for_constant_factor() {
        let u = samples(&[0.3, 1.4, 0.9, 2.2], &[1.0, 2.0, 1.5, 0.5]);
        let v = samples(&[0.8; 4], &[1.0, 2.0, 1.5, 0.5]);
        let (lhs, rhs) = hardy_littlewood_check(&u, &v).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
    }

    #[test]
    fn hardy_littlewood_self_pairing() {
        let u = samples(&[0.3, 1.4, 0.9], &[1.0; 3]);
        let (lhs, rhs) = hardy_littlewood_check(&u, &u).unwrap();
        // u paired with itself is already aligned
        assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
        assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn hardy_littlewood_rejects_mismatched_layouts() {
        let u = samples(&[1.0, 2.0], &[1.0, 1.0]);
        let v = samples(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]);
        assert!(hardy_littlewood_check(&u, &v).is_err());
        let w = samples(&[1.0, 2.0], &[1.0, 2.0]);
        assert!(hardy_littlewood_check(&u, &w).is_err());
    }

    #[test]
    fn potential_sup_closed_forms() {
        // unit ball in 3d: R^2 / (2(n-2)) with R = 1
        let v3 = newtonian_potential_sup(3, 4.0 * std::f64::consts::PI / 3.0).unwrap();
        assert_relative_eq!(v3, 0.5, max_relative = 1e-13);
        let v4 = newtonian_potential_sup(4, unit_ball_volume(4).unwrap()).unwrap();
        assert_relative_eq!(v4, 0.25, max_relative = 1e-13);
        // Vol -> 0 drives the bound to 0
        assert!(newtonian_potential_sup(3, 1e-30).unwrap() < 1e-19);
        assert!(newtonian_potential_sup(2, 1.0).is_err());
    }

    #[test]
    fn centered_ball_attains_the_potential_bound() {
        let region = PotentialRegion::Ball {
            center: [0.0; 3],
            radius: 1.0,
        };
        let est = newtonian_potential_mc(&region, [0.0; 3], 40_000, 7);
        assert!((est - 0.5).abs() < 0.01, "estimate {est}");
    }

    #[test]
    fn monte_carlo_is_deterministic_per_seed() {
        let region = PotentialRegion::Cuboid {
            corner: [0.1, -0.2, 0.0],
            sides: [1.0, 2.0, 0.7],
        };
        let a = newtonian_potential_mc(&region, [0.0; 3], 5_000, 42);
        let b = newtonian_potential_mc(&region, [0.0; 3], 5_000, 42);
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn rearrangement_is_equimeasurable(
            vals in proptest::collection::vec(0.0f64..10.0, 1..40),
            ws in proptest::collection::vec(0.01f64..2.0, 1..40),
        ) {
            let n = vals.len().min(ws.len());
            let s = samples(&vals[..n], &ws[..n]);
            let r = decreasing_rearrangement(&s);
            let rs = WeightedSamples::new(
                r.steps().iter().map(|&(v, _)| v).collect(),
                r.steps().iter().map(|&(_, w)| w).collect(),
            ).unwrap();
            for &t in vals[..n].iter().chain([0.0, 5.0].iter()) {
                let a = distribution_function(&s, t).unwrap();
                let b = distribution_function(&rs, t).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            }
            // integral identity against the direct weighted sum
            let direct: f64 = s.values().iter().zip(s.weights()).map(|(&v, &w)| v * w).sum();
            prop_assert!((r.integral() - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        }

        #[test]
        fn bathtub_is_monotone_in_capacity(
            dists in proptest::collection::vec(0.05f64..5.0, 2..30),
            caps in proptest::collection::vec(0.0f64..1.0, 2..5),
        ) {
            let pts: Vec<(f64, f64)> = dists.iter().map(|&d| (d, 0.1)).collect();
            let total: f64 = pts.iter().map(|&(_, w)| w).sum();
            let f = RadialProfile::new(|r: f64| (-r).exp());
            let mut caps: Vec<f64> = caps.iter().map(|c| c * total).collect();
            caps.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut last = -1.0;
            for c in caps {
                let (v, _) = bathtub_supremum(&f, &pts, c).unwrap();
                prop_assert!(v >= last - 1e-12);
                last = v;
            }
        }

        #[test]
        fn hardy_littlewood_holds_on_random_pairs(
            uv in proptest::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..60),
        ) {
            let w = vec![0.37; uv.len()];
            let u = samples(&uv.iter().map(|p| p.0).collect::<Vec<_>>(), &w);
            let v = samples(&uv.iter().map(|p| p.1).collect::<Vec<_>>(), &w);
            let (lhs, rhs) = hardy_littlewood_check(&u, &v).unwrap();
            prop_assert!(lhs <= rhs + 1e-12 * rhs.abs().max(1.0));
        }
    }
}
