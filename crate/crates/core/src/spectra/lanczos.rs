//! Shift-inverted, fully reorthogonalized, thick-restart Lanczos iteration
//! for the lowest eigenpairs of the sparse discrete Laplacian.
//!
//! The iteration runs on (A - shift I)^{-1} with the factor held as a banded
//! Cholesky decomposition; the transformed extremal eigenvalues are the
//! lowest of A, which is what the nodal pipeline needs.

use super::dense::symmetric_eigen;
use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sparse symmetric operator: constant off-diagonal on an adjacency list
/// plus a per-row diagonal (the five-point Laplacian fits this shape).
pub(crate) struct SparseSym {
    pub n: usize,
    pub diag: Vec<f64>,
    pub offsets: Vec<u32>,
    pub columns: Vec<u32>,
    pub off_value: f64,
}

impl SparseSym {
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = self.diag[i] * v[i];
            let lo = self.offsets[i] as usize;
            let hi = self.offsets[i + 1] as usize;
            for &j in &self.columns[lo..hi] {
                acc += self.off_value * v[j as usize];
            }
            out[i] = acc;
        }
    }

    pub fn residual_norm(&self, lambda: f64, v: &[f64]) -> f64 {
        let mut av = vec![0.0; self.n];
        self.apply(v, &mut av);
        let mut acc = 0.0;
        for i in 0..self.n {
            let r = av[i] - lambda * v[i];
            acc += r * r;
        }
        acc.sqrt()
    }

    /// Maximum index distance between coupled rows.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for i in 0..self.n {
            let lo = self.offsets[i] as usize;
            let hi = self.offsets[i + 1] as usize;
            for &j in &self.columns[lo..hi] {
                bw = bw.max(i.abs_diff(j as usize));
            }
        }
        bw
    }
}

/// Banded Cholesky factor of a symmetric positive definite matrix.
///
/// Row-major storage of the lower band: entry (i, j) with
/// `i - bw <= j <= i` lives at `data[i * (bw + 1) + (j + bw - i)]`.
pub(crate) struct BandedCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedCholesky {
    /// Factor the banded matrix given in the same lower-band layout.
    pub fn factor(n: usize, bw: usize, mut band: Vec<f64>) -> Result<Self> {
        let w = bw + 1;
        assert_eq!(band.len(), n * w);
        for i in 0..n {
            let jlo = i.saturating_sub(bw);
            for j in jlo..=i {
                let mut sum = band[i * w + (j + bw - i)];
                let klo = jlo.max(j.saturating_sub(bw));
                for k in klo..j {
                    sum -= band[i * w + (k + bw - i)] * band[j * w + (k + bw - j)];
                }
                if j == i {
                    if sum <= 0.0 {
                        return Err(Error::NonConvergence {
                            op: "banded_cholesky",
                            msg: format!("matrix not positive definite at row {i}"),
                        });
                    }
                    band[i * w + bw] = sum.sqrt();
                } else {
                    band[i * w + (j + bw - i)] = sum / band[j * w + bw];
                }
            }
        }
        Ok(BandedCholesky { n, bw, data: band })
    }

    /// Solve (L L^T) x = b in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let w = self.bw + 1;
        for i in 0..self.n {
            let jlo = i.saturating_sub(self.bw);
            let mut sum = x[i];
            for j in jlo..i {
                sum -= self.data[i * w + (j + self.bw - i)] * x[j];
            }
            x[i] = sum / self.data[i * w + self.bw];
        }
        for i in (0..self.n).rev() {
            let jhi = (i + self.bw).min(self.n - 1);
            let mut sum = x[i];
            for j in (i + 1)..=jhi {
                sum -= self.data[j * w + (i + self.bw - j)] * x[j];
            }
            x[i] = sum / self.data[i * w + self.bw];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lowest `count` eigenpairs of `a` via shift-inverted thick-restart Lanczos.
///
/// `chol` must factor `a - shift*I`. Restarts until the measured residuals
/// `||A y - lambda y||` drop below `residual_tol` (vectors are unit length).
pub(crate) fn shift_invert_lanczos(
    a: &SparseSym,
    chol: &BandedCholesky,
    shift: f64,
    count: usize,
    residual_tol: f64,
    seed: u64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.n;
    assert!(count >= 1 && count <= n);
    let m = n.min((2 * count + 40).max(100));
    let keep = (count + 20).min(m.saturating_sub(2)).max(count.min(m - 1));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut t = vec![0.0f64; m * m];

    let mut v0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nv = norm(&v0);
    v0.iter_mut().for_each(|x| *x /= nv);
    basis.push(v0);

    let mut filled = 1usize; // columns of the basis currently valid
    let mut beta_last;
    let mut last_residual_vec: Vec<f64>;

    for _restart in 0..200 {
        // extend the basis to m columns with full reorthogonalization,
        // measuring the projected operator into t
        while filled < m {
            let j = filled - 1;
            let mut w = basis[j].clone();
            chol.solve_in_place(&mut w);
            for i in 0..=j {
                let c = dot(&w, &basis[i]);
                t[i * m + j] = c;
                t[j * m + i] = c;
                let bi = &basis[i];
                w.iter_mut().zip(bi).for_each(|(x, y)| *x -= c * y);
            }
            for i in 0..=j {
                let c = dot(&w, &basis[i]);
                let bi = &basis[i];
                w.iter_mut().zip(bi).for_each(|(x, y)| *x -= c * y);
            }
            let b = norm(&w);
            if b < 1e-300 {
                // invariant subspace hit; replace with a fresh random direction
                let mut fresh: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                for v in &basis {
                    let c = dot(&fresh, v);
                    fresh.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                }
                let fb = norm(&fresh);
                fresh.iter_mut().for_each(|x| *x /= fb);
                basis.push(fresh);
            } else {
                if j + 1 < m {
                    t[j * m + (j + 1)] = b;
                    t[(j + 1) * m + j] = b;
                }
                let mut v = w;
                v.iter_mut().for_each(|x| *x /= b);
                basis.push(v);
            }
            filled += 1;
        }
        // the m-th direction is the unnormalized continuation residual
        let j = filled - 1;
        let mut w = basis[j].clone();
        chol.solve_in_place(&mut w);
        for i in 0..=j {
            let c = dot(&w, &basis[i]);
            t[i * m + j] = c;
            t[j * m + i] = c;
            let bi = &basis[i];
            w.iter_mut().zip(bi).for_each(|(x, y)| *x -= c * y);
        }
        for i in 0..=j {
            let c = dot(&w, &basis[i]);
            let bi = &basis[i];
            w.iter_mut().zip(bi).for_each(|(x, y)| *x -= c * y);
        }
        beta_last = norm(&w);
        last_residual_vec = w;

        // Rayleigh-Ritz on the projected operator
        let (theta, s) = symmetric_eigen(t.clone(), m)?;
        // largest theta of (A - shift)^{-1} <-> smallest lambda of A
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| theta[j].partial_cmp(&theta[i]).expect("finite Ritz values"));

        let ritz_residual =
            |col: usize| -> f64 { beta_last * s[order[col] * m + (m - 1)].abs() };
        let converged = (0..count).all(|c| ritz_residual(c) <= 1e-13);

        if converged {
            // assemble Ritz vectors for the wanted pairs
            let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
            for &oi in order.iter().take(count) {
                let mut y = vec![0.0; n];
                for (bi, base) in basis.iter().take(m).enumerate() {
                    let c = s[oi * m + bi];
                    y.iter_mut().zip(base).for_each(|(x, v)| *x += c * v);
                }
                let ny = norm(&y);
                y.iter_mut().for_each(|x| *x /= ny);
                let lam = 1.0 / theta[oi] + shift;
                pairs.push((lam, y));
            }
            // polish: orthonormalize and re-project onto A within the span
            polish(a, &mut pairs)?;
            pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite eigenvalues"));
            let worst = pairs
                .iter()
                .map(|(lam, v)| a.residual_norm(*lam, v))
                .fold(0.0f64, f64::max);
            if worst <= residual_tol {
                let (vals, vecs) = pairs.into_iter().unzip();
                return Ok((vals, vecs));
            }
        }

        // thick restart: lock the best `keep` Ritz vectors
        let mut new_basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        for &oi in order.iter().take(keep) {
            let mut y = vec![0.0; n];
            for (bi, base) in basis.iter().take(m).enumerate() {
                let c = s[oi * m + bi];
                y.iter_mut().zip(base).for_each(|(x, v)| *x += c * v);
            }
            let ny = norm(&y);
            y.iter_mut().for_each(|x| *x /= ny);
            new_basis.push(y);
        }
        let mut res = last_residual_vec;
        if beta_last > 1e-300 {
            res.iter_mut().for_each(|x| *x /= beta_last);
        } else {
            res = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        }
        for v in &new_basis {
            let c = dot(&res, v);
            res.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
        }
        let nr = norm(&res);
        res.iter_mut().for_each(|x| *x /= nr);
        new_basis.push(res);

        t.iter_mut().for_each(|x| *x = 0.0);
        for (i, &oi) in order.iter().take(keep).enumerate() {
            t[i * m + i] = theta[oi];
        }
        basis = new_basis;
        filled = keep + 1;
    }

    Err(Error::NonConvergence {
        op: "shift_invert_lanczos",
        msg: format!("residuals above {residual_tol} after restart budget"),
    })
}

/// Orthonormalize the computed vectors and solve the small projected
/// eigenproblem of A restricted to their span; optimal within the subspace.
fn polish(a: &SparseSym, pairs: &mut Vec<(f64, Vec<f64>)>) -> Result<()> {
    let k = pairs.len();
    let n = a.n;
    // modified Gram-Schmidt
    for i in 0..k {
        for j in 0..i {
            let (head, tail) = pairs.split_at_mut(i);
            let c = dot(&tail[0].1, &head[j].1);
            let vj = &head[j].1;
            tail[0].1.iter_mut().zip(vj).for_each(|(x, y)| *x -= c * y);
        }
        let nv = norm(&pairs[i].1);
        pairs[i].1.iter_mut().for_each(|x| *x /= nv);
    }
    let mut av = vec![0.0; n];
    let mut h = vec![0.0; k * k];
    for i in 0..k {
        a.apply(&pairs[i].1, &mut av);
        for j in 0..=i {
            let c = dot(&av, &pairs[j].1);
            h[i * k + j] = c;
            h[j * k + i] = c;
        }
    }
    let (vals, rot) = symmetric_eigen(h, k)?;
    let mut rotated: Vec<(f64, Vec<f64>)> = Vec::with_capacity(k);
    for r in 0..k {
        let mut y = vec![0.0; n];
        for (c, pair) in pairs.iter().enumerate() {
            let w = rot[r * k + c];
            y.iter_mut().zip(&pair.1).for_each(|(x, v)| *x += w * v);
        }
        let ny = norm(&y);
        y.iter_mut().for_each(|x| *x /= ny);
        rotated.push((vals[r], y));
    }
    *pairs = rotated;
    Ok(())
}
