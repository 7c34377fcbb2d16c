//! Five-point finite-difference Laplacian on masked planar grids, with
//! Dirichlet or Neumann (mirror) boundary treatment.

use super::dense::symmetric_eigen;
use super::lanczos::{shift_invert_lanczos, BandedCholesky, SparseSym};
use super::{normalize, BoundaryCondition, DomainSpec, EigenPair, Grid, ScalarField};
use crate::error::{Error, Result};
use std::sync::Arc;

/// Largest active-point count accepted by the solver.
pub const FD_MAX_POINTS: usize = 20_000;
/// Largest eigenpair count per spectrum.
pub const FD_MAX_COUNT: usize = 200;
/// Crossover between the dense Householder/QL path and the restarted
/// shift-inverted Krylov path.
const DENSE_MAX: usize = 2_000;
/// Residual contract: every returned pair satisfies ||A u - lambda u|| below
/// this times ||u||.
const RESIDUAL_TOL: f64 = 1e-8;
const LANCZOS_SEED: u64 = 0x6e6f64616c;

/// Lowest `count` eigenpairs of the discrete Laplacian on a masked grid.
pub fn fd_spectrum(domain: &DomainSpec, count: usize) -> Result<Vec<EigenPair>> {
    fd_spectrum_with_crossover(domain, count, DENSE_MAX)
}

fn fd_spectrum_with_crossover(
    domain: &DomainSpec,
    count: usize,
    dense_max: usize,
) -> Result<Vec<EigenPair>> {
    if !matches!(domain, DomainSpec::MaskedGrid { .. }) {
        return Err(Error::domain(
            "fd_spectrum",
            "finite differences require a masked_grid domain",
        ));
    }
    let grid = Grid::build(domain)?;
    let n = grid.len();
    if n > FD_MAX_POINTS {
        return Err(Error::domain(
            "fd_spectrum",
            format!("{n} active points exceed the cap of {FD_MAX_POINTS}"),
        ));
    }
    if count == 0 || count > n.min(FD_MAX_COUNT) {
        return Err(Error::domain(
            "fd_spectrum",
            format!("count must be in 1..={}, got {count}", n.min(FD_MAX_COUNT)),
        ));
    }
    let (_, _, h, bc, _, _) = grid.masked_parts().expect("masked grid");
    let op = assemble(&grid, h, bc);

    let (values, vectors) = if n <= dense_max {
        dense_path(&op, count)?
    } else {
        krylov_path(&op, count)?
    };

    let mut pairs = Vec::with_capacity(count);
    for (i, (lam, mut vec)) in values.into_iter().zip(vectors).enumerate() {
        let res = op.residual_norm(lam, &vec);
        if res > RESIDUAL_TOL {
            return Err(Error::NonConvergence {
                op: "fd_spectrum",
                msg: format!("eigenpair {i} residual {res:.3e} above {RESIDUAL_TOL:.0e}"),
            });
        }
        fix_sign(&mut vec);
        // solver vectors are unit in plain l2; dividing by h makes the
        // weighted (measure) L2 norm one
        vec.iter_mut().for_each(|x| *x /= h);
        let pair = EigenPair {
            lambda: lam,
            index: i + 1,
            field: ScalarField::new(Arc::clone(&grid), vec)?,
            norm_l2: 0.0,
        };
        pairs.push(normalize(&pair)?);
    }
    Ok(pairs)
}

fn assemble(grid: &Arc<Grid>, h: f64, bc: BoundaryCondition) -> SparseSym {
    let n = grid.len();
    let inv_h2 = 1.0 / (h * h);
    let mut diag = vec![0.0; n];
    let mut offsets = vec![0u32; n + 1];
    let mut columns = Vec::with_capacity(4 * n);
    let mut nbrs = Vec::new();
    for i in 0..n {
        grid.neighbors(i, &mut nbrs);
        diag[i] = match bc {
            BoundaryCondition::Dirichlet => 4.0 * inv_h2,
            BoundaryCondition::Neumann => nbrs.len() as f64 * inv_h2,
        };
        for &j in &nbrs {
            columns.push(j as u32);
        }
        offsets[i + 1] = columns.len() as u32;
    }
    SparseSym {
        n,
        diag,
        offsets,
        columns,
        off_value: -inv_h2,
    }
}

fn dense_path(op: &SparseSym, count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = op.n;
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        a[i * n + i] = op.diag[i];
        let lo = op.offsets[i] as usize;
        let hi = op.offsets[i + 1] as usize;
        for &j in &op.columns[lo..hi] {
            a[i * n + j as usize] = op.off_value;
        }
    }
    let (vals, vecs) = symmetric_eigen(a, n)?;
    let values = vals[..count].to_vec();
    let vectors = (0..count).map(|k| vecs[k * n..(k + 1) * n].to_vec()).collect();
    Ok((values, vectors))
}

fn krylov_path(op: &SparseSym, count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    // factor A + I, which is positive definite for both boundary conditions
    let shift = -1.0;
    let bw = op.bandwidth();
    let w = bw + 1;
    let n = op.n;
    let mut band = vec![0.0; n * w];
    for i in 0..n {
        band[i * w + bw] = op.diag[i] - shift;
        let lo = op.offsets[i] as usize;
        let hi = op.offsets[i + 1] as usize;
        for &jj in &op.columns[lo..hi] {
            let j = jj as usize;
            if j < i {
                band[i * w + (j + bw - i)] = op.off_value;
            }
        }
    }
    let chol = BandedCholesky::factor(n, bw, band)?;
    shift_invert_lanczos(op, &chol, shift, count, RESIDUAL_TOL, LANCZOS_SEED)
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    let mut best_abs = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Apply the discrete Laplacian of the field's grid to its values.
///
/// Dirichlet extension on flat grids (missing neighbors contribute zero);
/// masked grids honor their stored boundary condition. Values are reliable
/// at interior points; the sphere is not supported.
pub fn apply_discrete_laplacian(field: &ScalarField) -> Result<Vec<f64>> {
    let grid = field.grid();
    let u = field.values();
    let n = grid.len();
    let mut out = vec![0.0; n];
    let mut nbrs = Vec::new();

    if let Some((nx, _ny, hx, hy, _periodic)) = grid.cart2_parts() {
        let ihx2 = 1.0 / (hx * hx);
        let ihy2 = 1.0 / (hy * hy);
        for i in 0..n {
            grid.neighbors(i, &mut nbrs);
            let mut acc = 2.0 * (ihx2 + ihy2) * u[i];
            for &j in &nbrs {
                let horizontal = j / nx == i / nx;
                acc -= if horizontal { ihx2 } else { ihy2 } * u[j];
            }
            out[i] = acc;
        }
        return Ok(out);
    }
    if let Some((dims, h, _periodic)) = grid.cart3_parts() {
        let inv = [1.0 / (h[0] * h[0]), 1.0 / (h[1] * h[1]), 1.0 / (h[2] * h[2])];
        for i in 0..n {
            grid.neighbors(i, &mut nbrs);
            let mut acc = 2.0 * (inv[0] + inv[1] + inv[2]) * u[i];
            for &j in &nbrs {
                let axis = if j / dims[0] == i / dims[0] && (j % dims[0] != i % dims[0]) {
                    0
                } else if j / (dims[0] * dims[1]) == i / (dims[0] * dims[1]) {
                    1
                } else {
                    2
                };
                acc -= inv[axis] * u[j];
            }
            out[i] = acc;
        }
        return Ok(out);
    }
    if let Some((_, _, h, bc, _, _)) = grid.masked_parts() {
        let inv_h2 = 1.0 / (h * h);
        for i in 0..n {
            grid.neighbors(i, &mut nbrs);
            let deg = match bc {
                BoundaryCondition::Dirichlet => 4.0,
                BoundaryCondition::Neumann => nbrs.len() as f64,
            };
            let mut acc = deg * inv_h2 * u[i];
            for &j in &nbrs {
                acc -= inv_h2 * u[j];
            }
            out[i] = acc;
        }
        return Ok(out);
    }
    Err(Error::domain(
        "apply_discrete_laplacian",
        "unsupported grid kind (sphere has no flat stencil)",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{lp_norm, MaskShape};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit_square(h: f64, bc: BoundaryCondition) -> DomainSpec {
        DomainSpec::MaskedGrid {
            shape: MaskShape::Rectangle {
                width: 1.0,
                height: 1.0,
            },
            h,
            bc,
        }
    }

    #[test]
    fn dirichlet_square_ground_state() {
        let pairs = fd_spectrum(&unit_square(1.0 / 24.0, BoundaryCondition::Dirichlet), 4).unwrap();
        let want = 2.0 * PI * PI;
        assert!(
            (pairs[0].lambda - want).abs() / want < 0.005,
            "lambda_1 = {}",
            pairs[0].lambda
        );
        // second eigenvalue is the double 5 pi^2
        assert_relative_eq!(pairs[1].lambda, pairs[2].lambda, max_relative = 1e-8);
        for p in &pairs {
            assert_relative_eq!(lp_norm(&p.field, 2.0).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn neumann_square_starts_at_zero_with_constant_mode() {
        let pairs = fd_spectrum(&unit_square(1.0 / 16.0, BoundaryCondition::Neumann), 3).unwrap();
        assert!(pairs[0].lambda.abs() < 1e-8, "mu_1 = {}", pairs[0].lambda);
        let vals = pairs[0].field.values();
        let (lo, hi) = vals
            .iter()
            .fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        assert!((hi - lo).abs() < 1e-6, "constant mode spread {}", hi - lo);
        let want = PI * PI;
        assert!((pairs[1].lambda - want).abs() / want < 0.01);
    }

    #[test]
    fn dense_and_krylov_paths_agree() {
        let d = unit_square(1.0 / 14.0, BoundaryCondition::Dirichlet);
        let dense = fd_spectrum_with_crossover(&d, 6, usize::MAX).unwrap();
        let krylov = fd_spectrum_with_crossover(&d, 6, 0).unwrap();
        for (a, b) in dense.iter().zip(&krylov) {
            assert_relative_eq!(a.lambda, b.lambda, max_relative = 1e-9);
        }
    }

    #[test]
    fn eigenfunctions_of_distinct_eigenvalues_are_orthogonal() {
        let pairs = fd_spectrum(&unit_square(1.0 / 20.0, BoundaryCondition::Dirichlet), 6).unwrap();
        for i in 0..pairs.len() {
            for j in (i + 1)..pairs.len() {
                if (pairs[i].lambda - pairs[j].lambda).abs() < 1e-6 {
                    continue;
                }
                let gi = pairs[i].field.grid();
                let dot: f64 = pairs[i]
                    .field
                    .values()
                    .iter()
                    .zip(pairs[j].field.values())
                    .enumerate()
                    .map(|(k, (&a, &b))| a * b * gi.weight(k))
                    .sum();
                assert!(dot.abs() < 1e-8, "({i},{j}): {dot}");
            }
        }
    }

    #[test]
    fn rejects_oversized_requests() {
        let d = unit_square(1.0 / 8.0, BoundaryCondition::Dirichlet);
        assert!(fd_spectrum(&d, 0).is_err());
        assert!(fd_spectrum(&d, 100).is_err()); // only 64 points
        let analytic = DomainSpec::rectangle(1.0, 1.0);
        assert!(fd_spectrum(&analytic, 4).is_err());
    }

    #[test]
    fn discrete_laplacian_matches_eigenvalue_on_analytic_field() {
        // lambda u within O(h^2) at interior points, and the error contracts
        // by at least ~4x when h halves
        let err_at = |res: u32| -> f64 {
            let d = DomainSpec::rectangle(1.0, 1.0).with_resolution(res);
            let pairs = crate::spectra::analytic_spectrum(&d, 1).unwrap();
            let p = &pairs[0];
            let lap = apply_discrete_laplacian(&p.field).unwrap();
            let grid = p.field.grid();
            let mut worst = 0.0f64;
            let mut nbrs = Vec::new();
            for i in 0..grid.len() {
                grid.neighbors(i, &mut nbrs);
                if nbrs.len() < 4 {
                    continue;
                }
                worst = worst.max((lap[i] - p.lambda * p.field.values()[i]).abs());
            }
            worst
        };
        let e16 = err_at(16);
        let e32 = err_at(32);
        assert!(e32 < e16 / 3.5, "e16={e16}, e32={e32}");
    }
}
