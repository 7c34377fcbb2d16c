//! Nodal decompositions: partition an eigenfunction's grid support into
//! sign-constant connected components, then measure per-domain extrema and
//! superlevel-set volumes.

use crate::error::{Error, Result};
use crate::specfun::{bessel_first_zero, unit_ball_volume, BesselOrder};
use crate::spectra::{lp_norm, EigenPair, ScalarField};

/// Default zero tolerance as a fraction of the sup norm. Finite-difference
/// eigenfunctions rarely vanish exactly on grid points; the tolerance keeps
/// near-zero samples out of the domains instead of minting spurious
/// single-point components.
pub const DEFAULT_ZERO_TOL_FACTOR: f64 = 1e-9;

/// Zero-tolerance fraction for masked grids (finite-difference fields and
/// sampled disks). Where nodal lines cross, the lattice point nearest the
/// saddle carries a value of order `lambda h^2` times the sup; near a disk
/// center, sector tips pinch below grid scale. Under 4-connectivity both
/// would otherwise surface as few-point fragments. Still within the
/// `0.01 * sup` precondition of [`decompose`].
pub const MASKED_ZERO_TOL_FACTOR: f64 = 5e-3;

/// One sign-constant connected component of `{|u| > tol}`.
#[derive(Debug, Clone)]
pub struct NodalDomain {
    /// Grid indices of the member points.
    pub points: Vec<u32>,
    pub sign: i8,
    /// Sum of member weights.
    pub volume: f64,
    /// Nodal extremum: max of |u| over the domain.
    pub max_abs: f64,
    /// Grid index attaining the extremum.
    pub argmax: u32,
    /// Whether any member cell touches the domain boundary or mask edge.
    pub touches_boundary: bool,
}

/// The full partition of an eigenfunction's support.
#[derive(Debug, Clone)]
pub struct NodalDecomposition {
    pub lambda: f64,
    pub zero_tolerance: f64,
    /// Domains sorted by descending volume (ties by lowest member index).
    pub domains: Vec<NodalDomain>,
    field: ScalarField,
}

impl NodalDecomposition {
    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn domain_count(&self) -> usize {
        self.domains.len()
    }

    /// Sum of member weights over all domains plus the measure of the
    /// near-zero set; equals the total grid measure by construction.
    pub fn support_partition(&self) -> (f64, f64) {
        let grid = self.field.grid();
        let in_domains: f64 = self.domains.iter().map(|d| d.volume).sum();
        let mut near_zero = 0.0;
        for (i, &v) in self.field.values().iter().enumerate() {
            if v.abs() <= self.zero_tolerance {
                near_zero += grid.weight(i);
            }
        }
        (in_domains, near_zero)
    }
}

/// Suggested `zero_tolerance` for an eigenpair: the tight default on
/// regular grids, the saddle/fragment-robust factor on masked grids.
pub fn default_zero_tolerance(pair: &EigenPair) -> Result<f64> {
    let factor = if pair.field.grid().masked_kind() {
        MASKED_ZERO_TOL_FACTOR
    } else {
        DEFAULT_ZERO_TOL_FACTOR
    };
    Ok(factor * lp_norm(&pair.field, f64::INFINITY)?)
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// Partition `{|u| > zero_tolerance}` into sign-constant connected
/// components under the grid adjacency (4-neighbor in 2-d, 6-neighbor in
/// 3-d, with periodic and spherical wraparound).
pub fn decompose(pair: &EigenPair, zero_tolerance: f64) -> Result<NodalDecomposition> {
    let field = &pair.field;
    let grid = field.grid();
    let u = field.values();
    let sup = lp_norm(field, f64::INFINITY)?;
    if sup == 0.0 {
        return Err(Error::ZeroField("decompose"));
    }
    if !(0.0..=0.01 * sup).contains(&zero_tolerance) {
        return Err(Error::domain(
            "decompose",
            format!("zero_tolerance {zero_tolerance} outside [0, 0.01*sup = {}]", 0.01 * sup),
        ));
    }

    let n = grid.len();
    let active: Vec<bool> = u.iter().map(|&v| v.abs() > zero_tolerance).collect();
    let mut uf = UnionFind::new(n);
    let mut nbrs = Vec::new();
    for i in 0..n {
        if !active[i] {
            continue;
        }
        grid.neighbors(i, &mut nbrs);
        for &j in &nbrs {
            // join each edge once, and only between same-sign active points
            if j > i && active[j] && (u[i] > 0.0) == (u[j] > 0.0) {
                uf.union(i as u32, j as u32);
            }
        }
    }

    // group members by root, preserving index order within each domain
    let mut root_slot: Vec<i32> = vec![-1; n];
    let mut domains: Vec<NodalDomain> = Vec::new();
    for i in 0..n {
        if !active[i] {
            continue;
        }
        let root = uf.find(i as u32) as usize;
        let slot = if root_slot[root] >= 0 {
            root_slot[root] as usize
        } else {
            root_slot[root] = domains.len() as i32;
            domains.push(NodalDomain {
                points: Vec::new(),
                sign: if u[i] > 0.0 { 1 } else { -1 },
                volume: 0.0,
                max_abs: 0.0,
                argmax: i as u32,
                touches_boundary: false,
            });
            domains.len() - 1
        };
        let d = &mut domains[slot];
        d.points.push(i as u32);
        d.volume += grid.weight(i);
        if u[i].abs() > d.max_abs {
            d.max_abs = u[i].abs();
            d.argmax = i as u32;
        }
        if grid.is_boundary(i) {
            d.touches_boundary = true;
        }
    }
    domains.sort_by(|a, b| {
        b.volume
            .partial_cmp(&a.volume)
            .expect("finite volumes")
            .then(a.points[0].cmp(&b.points[0]))
    });

    Ok(NodalDecomposition {
        lambda: pair.lambda,
        zero_tolerance,
        domains,
        field: field.clone(),
    })
}

/// Per-domain superlevel volumes.
#[derive(Debug, Clone)]
pub struct SuperlevelStats {
    /// `per_domain[i]` lists `(delta, volume of {|u| >= delta * m_i})` in
    /// the order of `deltas`, for domain `i` of the decomposition.
    pub per_domain: Vec<Vec<(f64, f64)>>,
}

/// Volumes of the delta-superlevel sets of each domain; `deltas` must be
/// ascending and inside (0, 1).
pub fn superlevel_volumes(nd: &NodalDecomposition, deltas: &[f64]) -> Result<SuperlevelStats> {
    if deltas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("superlevel_volumes", "deltas must be ascending"));
    }
    if deltas.iter().any(|&d| !(0.0 < d && d < 1.0)) {
        return Err(Error::domain(
            "superlevel_volumes",
            "deltas must lie in (0, 1)",
        ));
    }
    let grid = nd.field().grid();
    let u = nd.field().values();
    let per_domain = nd
        .domains
        .iter()
        .map(|d| {
            deltas
                .iter()
                .map(|&delta| {
                    let threshold = delta * d.max_abs;
                    let vol = d
                        .points
                        .iter()
                        .filter(|&&p| u[p as usize].abs() >= threshold)
                        .map(|&p| grid.weight(p as usize))
                        .sum();
                    (delta, vol)
                })
                .collect()
        })
        .collect();
    Ok(SuperlevelStats { per_domain })
}

/// `sum_i m_i^p` over the nodal domains.
pub fn extrema_power_sum(nd: &NodalDecomposition, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::domain(
            "extrema_power_sum",
            format!("exponent must be >= 1, got {p}"),
        ));
    }
    Ok(nd.domains.iter().map(|d| d.max_abs.powf(p)).sum())
}

/// Number of domains with `m_i >= a * lambda^{(n-1)/4}`.
pub fn count_high_extrema(nd: &NodalDecomposition, a: f64, n: u32) -> Result<usize> {
    if !(a > 0.0) {
        return Err(Error::domain("count_high_extrema", "a must be positive"));
    }
    let threshold = a * nd.lambda.powf((n as f64 - 1.0) / 4.0);
    Ok(nd.domains.iter().filter(|d| d.max_abs >= threshold).count())
}

/// Per-domain `(volume, Faber-Krahn lower bound)` where the bound is
/// `(j_{n/2-1}^2)^{n/2} alpha_n lambda^{-n/2}`. Euclidean domains only.
pub fn faber_krahn_check(nd: &NodalDecomposition, n: u32) -> Result<Vec<(f64, f64)>> {
    if !nd.field().grid().domain().is_euclidean() {
        return Err(Error::domain(
            "faber_krahn_check",
            "the explicit constant applies to Euclidean domains only",
        ));
    }
    let j = bessel_first_zero(BesselOrder::for_dimension(n)?)?;
    let alpha = unit_ball_volume(n)?;
    let bound = (j * j).powf(n as f64 / 2.0) * alpha * nd.lambda.powf(-(n as f64) / 2.0);
    Ok(nd.domains.iter().map(|d| (d.volume, bound)).collect())
}
