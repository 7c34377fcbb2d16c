//! Dense symmetric eigendecomposition: Householder tridiagonalization
//! followed by implicit-shift QL with eigenvector accumulation.

use crate::error::{Error, Result};

/// Full eigendecomposition of a symmetric matrix given row-major.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvalues ascending and the
/// k-th eigenvector occupying `eigenvectors[k*n..(k+1)*n]` (unit Euclidean
/// norm).
pub fn symmetric_eigen(mut a: Vec<f64>, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || a.len() != n * n {
        return Err(Error::domain(
            "symmetric_eigen",
            format!("matrix storage {} does not match n={n}", a.len()),
        ));
    }
    if n == 1 {
        return Ok((vec![a[0]], vec![1.0]));
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut a, n, &mut d, &mut e);
    transpose_in_place(&mut a, n);
    tqli(&mut d, &mut e, n, &mut a)?;

    // sort ascending, permuting the eigenvector rows along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));
    let mut values = Vec::with_capacity(n);
    let mut vectors = vec![0.0; n * n];
    for (row, &src) in order.iter().enumerate() {
        values.push(d[src]);
        vectors[row * n..(row + 1) * n].copy_from_slice(&a[src * n..(src + 1) * n]);
    }
    Ok((values, vectors))
}

/// Householder reduction to tridiagonal form; on exit `a` holds the
/// accumulated orthogonal transformation (columns), `d` the diagonal and
/// `e[1..]` the subdiagonal.
fn tred2(a: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += a[i * n + k].abs();
            }
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let mut f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                f = 0.0;
                for j in 0..=l {
                    a[j * n + i] = a[i * n + j] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += a[i * n + k] * a[k * n + j];
                }
                for k in 0..i {
                    a[k * n + j] -= g * a[k * n + i];
                }
            }
        }
        d[i] = a[i * n + i];
        a[i * n + i] = 1.0;
        for j in 0..i {
            a[j * n + i] = 0.0;
            a[i * n + j] = 0.0;
        }
    }
}

fn transpose_in_place(a: &mut [f64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            a.swap(i * n + j, j * n + i);
        }
    }
}

/// Implicit-shift QL on a tridiagonal; `z` holds basis vectors as rows and
/// receives the accumulated rotations, so its rows end up as eigenvectors.
fn tqli(d: &mut [f64], e: &mut [f64], n: usize, z: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence {
                    op: "symmetric_eigen",
                    msg: format!("QL iteration stalled at row {l}"),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // apply the rotation to eigenvector rows i and i+1
                let (lo, hi) = z.split_at_mut((i + 1) * n);
                let row_i = &mut lo[i * n..(i + 1) * n];
                let row_i1 = &mut hi[..n];
                for k in 0..n {
                    f = row_i1[k];
                    row_i1[k] = s * row_i[k] + c * f;
                    row_i[k] = c * row_i[k] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn residual(a: &[f64], n: usize, lambda: f64, v: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut av = 0.0;
            for j in 0..n {
                av += a[i * n + j] * v[j];
            }
            worst = worst.max((av - lambda * v[i]).abs());
        }
        worst
    }

    #[test]
    fn discrete_1d_laplacian_closed_form() {
        // second-difference matrix: lambda_k = 2 - 2 cos(k pi / (n+1))
        let n = 40;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 2.0;
            if i + 1 < n {
                a[i * n + i + 1] = -1.0;
                a[(i + 1) * n + i] = -1.0;
            }
        }
        let (vals, vecs) = symmetric_eigen(a.clone(), n).unwrap();
        for (k, &lam) in vals.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((lam - want).abs() < 1e-12, "k={k}: {lam} vs {want}");
            let r = residual(&a, n, lam, &vecs[k * n..(k + 1) * n]);
            assert!(r < 1e-12, "k={k}: residual {r}");
        }
    }

    #[test]
    fn random_symmetric_matrix_decomposes() {
        let n = 60;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let (vals, vecs) = symmetric_eigen(a.clone(), n).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for k in 0..n {
            let r = residual(&a, n, vals[k], &vecs[k * n..(k + 1) * n]);
            assert!(r < 1e-11, "k={k}: residual {r}");
        }
        // pairwise orthonormality
        for i in 0..n {
            for j in i..n {
                let dot: f64 = (0..n).map(|k| vecs[i * n + k] * vecs[j * n + k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10, "({i},{j}): {dot}");
            }
        }
    }

    #[test]
    fn handles_diagonal_and_tiny_matrices() {
        let (vals, vecs) = symmetric_eigen(vec![3.0], 1).unwrap();
        assert_eq!(vals, vec![3.0]);
        assert_eq!(vecs, vec![1.0]);

        let a = vec![2.0, 0.0, 0.0, -1.0];
        let (vals, _) = symmetric_eigen(a, 2).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 2.0).abs() < 1e-14);

        assert!(symmetric_eigen(vec![1.0, 2.0], 3).is_err());
    }
}
