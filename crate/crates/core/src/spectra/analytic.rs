//! Closed-form eigenpair catalogs for the model domains: Dirichlet
//! rectangles/boxes, flat tori, the Dirichlet disk and the round sphere.
//!
//! Eigenvalues are enumerated ascending with multiplicities in a fixed
//! deterministic order, sampled onto the domain grid, and L^2-normalized.

use super::legendre::normalized_assoc_legendre;
use super::{
    normalize, DomainSpec, EigenPair, Grid, GridKind, ScalarField, WeightScheme,
};
use crate::error::{Error, Result};
use crate::specfun::{bessel_j, bessel_zeros, BesselOrder};
use std::f64::consts::PI;
use std::sync::Arc;

/// Hard cap on spectrum length (counting multiplicities).
pub const MAX_EIGEN_COUNT: usize = 200;

/// The `count` lowest eigenpairs of a model domain, sampled on its grid.
pub fn analytic_spectrum(domain: &DomainSpec, count: usize) -> Result<Vec<EigenPair>> {
    if count == 0 || count > MAX_EIGEN_COUNT {
        return Err(Error::domain(
            "analytic_spectrum",
            format!("count must be in 1..={MAX_EIGEN_COUNT}, got {count}"),
        ));
    }
    match domain {
        DomainSpec::Rectangle { width, height, .. } => {
            rectangle_spectrum(domain, *width, *height, count)
        }
        DomainSpec::Box3 { sides, .. } => box_spectrum(domain, *sides, count),
        DomainSpec::FlatTorus { lengths, .. } => torus_spectrum(domain, lengths, count),
        DomainSpec::Disk { radius, .. } => disk_spectrum(domain, *radius, count),
        DomainSpec::SphereS2 { .. } => sphere_spectrum(domain, count),
        DomainSpec::MaskedGrid { .. } => Err(Error::domain(
            "analytic_spectrum",
            "masked grids have no closed-form spectrum; use fd_spectrum",
        )),
    }
}

fn finish(grid: &Arc<Grid>, modes: Vec<(f64, Vec<f64>)>) -> Result<Vec<EigenPair>> {
    modes
        .into_iter()
        .enumerate()
        .map(|(i, (lambda, values))| {
            let pair = EigenPair {
                lambda,
                index: i + 1,
                field: ScalarField::new(Arc::clone(grid), values)?,
                norm_l2: 0.0,
            };
            normalize(&pair)
        })
        .collect()
}

fn rectangle_spectrum(
    domain: &DomainSpec,
    width: f64,
    height: f64,
    count: usize,
) -> Result<Vec<EigenPair>> {
    let grid = Grid::build(domain)?;
    let mut cap = ((PI / width).powi(2) + (PI / height).powi(2)) * 4.0;
    let modes = loop {
        let mut modes: Vec<(f64, u32, u32)> = Vec::new();
        let mut k = 1u32;
        loop {
            let lx = (k as f64 * PI / width).powi(2);
            if lx > cap {
                break;
            }
            let mut l = 1u32;
            loop {
                let lam = lx + (l as f64 * PI / height).powi(2);
                if lam > cap {
                    break;
                }
                modes.push((lam, k, l));
                l += 1;
            }
            k += 1;
        }
        if modes.len() >= count {
            modes.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .expect("finite eigenvalues")
                    .then(a.1.cmp(&b.1))
                    .then(a.2.cmp(&b.2))
            });
            modes.truncate(count);
            break modes;
        }
        cap *= 2.0;
    };

    let sampled = modes
        .into_iter()
        .map(|(lam, k, l)| {
            let values = (0..grid.len())
                .map(|i| {
                    let p = grid.position(i);
                    (k as f64 * PI * p[0] / width).sin() * (l as f64 * PI * p[1] / height).sin()
                })
                .collect();
            (lam, values)
        })
        .collect();
    finish(&grid, sampled)
}

fn box_spectrum(domain: &DomainSpec, sides: [f64; 3], count: usize) -> Result<Vec<EigenPair>> {
    let grid = Grid::build(domain)?;
    let base: f64 = sides.iter().map(|s| (PI / s).powi(2)).sum();
    let mut cap = base * 4.0;
    let modes = loop {
        let mut modes: Vec<(f64, [u32; 3])> = Vec::new();
        let mut k = 1u32;
        while (k as f64 * PI / sides[0]).powi(2) <= cap {
            let lx = (k as f64 * PI / sides[0]).powi(2);
            let mut l = 1u32;
            while lx + (l as f64 * PI / sides[1]).powi(2) <= cap {
                let ly = (l as f64 * PI / sides[1]).powi(2);
                let mut m = 1u32;
                loop {
                    let lam = lx + ly + (m as f64 * PI / sides[2]).powi(2);
                    if lam > cap {
                        break;
                    }
                    modes.push((lam, [k, l, m]));
                    m += 1;
                }
                l += 1;
            }
            k += 1;
        }
        if modes.len() >= count {
            modes.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .expect("finite eigenvalues")
                    .then(a.1.cmp(&b.1))
            });
            modes.truncate(count);
            break modes;
        }
        cap *= 2.0;
    };

    let sampled = modes
        .into_iter()
        .map(|(lam, ks)| {
            let values = (0..grid.len())
                .map(|i| {
                    let p = grid.position(i);
                    (0..3)
                        .map(|d| (ks[d] as f64 * PI * p[d] / sides[d]).sin())
                        .product()
                })
                .collect();
            (lam, values)
        })
        .collect();
    finish(&grid, sampled)
}

/// Number of box eigenvalues (with multiplicity) at or below `lambda_cap`,
/// without sampling fields. Handy for sizing mode families by eigenvalue
/// range.
pub fn box_modes_below(sides: [f64; 3], lambda_cap: f64) -> usize {
    let mut n = 0usize;
    let mut k = 1u32;
    while (k as f64 * PI / sides[0]).powi(2) <= lambda_cap {
        let lx = (k as f64 * PI / sides[0]).powi(2);
        let mut l = 1u32;
        while lx + (l as f64 * PI / sides[1]).powi(2) <= lambda_cap {
            let ly = (l as f64 * PI / sides[1]).powi(2);
            let mut m = 1u32;
            while lx + ly + (m as f64 * PI / sides[2]).powi(2) <= lambda_cap {
                n += 1;
                m += 1;
            }
            l += 1;
        }
        k += 1;
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TorusFactor {
    One,
    Cos,
    Sin,
}

fn torus_spectrum(domain: &DomainSpec, lengths: &[f64], count: usize) -> Result<Vec<EigenPair>> {
    let grid = Grid::build(domain)?;
    let dim = lengths.len();
    let base: f64 = lengths.iter().map(|l| (2.0 * PI / l).powi(2)).sum();
    let mut cap = base * 4.0;
    let modes = loop {
        // frequency vectors with lambda <= cap, then trig combinations
        let mut freqs: Vec<(f64, Vec<u32>)> = Vec::new();
        let kmax: Vec<u32> = lengths
            .iter()
            .map(|l| (cap.sqrt() * l / (2.0 * PI)).floor() as u32)
            .collect();
        let mut kvec = vec![0u32; dim];
        loop {
            let lam: f64 = kvec
                .iter()
                .zip(lengths)
                .map(|(&k, &l)| (2.0 * PI * k as f64 / l).powi(2))
                .sum();
            if lam <= cap {
                freqs.push((lam, kvec.clone()));
            }
            // odometer increment
            let mut d = 0;
            loop {
                if d == dim {
                    break;
                }
                if kvec[d] < kmax[d] {
                    kvec[d] += 1;
                    break;
                }
                kvec[d] = 0;
                d += 1;
            }
            if d == dim {
                break;
            }
        }
        freqs.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("finite eigenvalues")
                .then(a.1.cmp(&b.1))
        });
        let mut modes: Vec<(f64, Vec<u32>, Vec<TorusFactor>)> = Vec::new();
        'outer: for (lam, kvec) in freqs {
            let active: Vec<usize> = (0..dim).filter(|&d| kvec[d] > 0).collect();
            let combos = 1usize << active.len();
            for c in 0..combos {
                let mut factors = vec![TorusFactor::One; dim];
                for (bit, &d) in active.iter().enumerate() {
                    factors[d] = if c & (1 << bit) == 0 {
                        TorusFactor::Cos
                    } else {
                        TorusFactor::Sin
                    };
                }
                modes.push((lam, kvec.clone(), factors));
                if modes.len() == count {
                    break 'outer;
                }
            }
        }
        if modes.len() >= count {
            break modes;
        }
        cap *= 2.0;
    };

    let sampled = modes
        .into_iter()
        .map(|(lam, kvec, factors)| {
            let values = (0..grid.len())
                .map(|i| {
                    let p = grid.position(i);
                    let mut v = 1.0;
                    for d in 0..dim {
                        let arg = 2.0 * PI * kvec[d] as f64 * p[d] / lengths[d];
                        v *= match factors[d] {
                            TorusFactor::One => 1.0,
                            TorusFactor::Cos => arg.cos(),
                            TorusFactor::Sin => arg.sin(),
                        };
                    }
                    v
                })
                .collect();
            (lam, values)
        })
        .collect();
    finish(&grid, sampled)
}

fn disk_spectrum(domain: &DomainSpec, radius: f64, count: usize) -> Result<Vec<EigenPair>> {
    let grid = Grid::build(domain)?;
    let mut zcap = 12.0f64; // cap on j_{m,s}
    let modes = loop {
        let mut modes: Vec<(f64, u32, u32, bool)> = Vec::new(); // (lambda, m, s, is_sin)
        let mut m = 0u32;
        while (m as f64) < zcap {
            let order = BesselOrder::new(m as f64)?;
            let smax = ((zcap / PI - m as f64 / 2.0 + 0.25).ceil() as usize).max(1) + 1;
            let zeros = bessel_zeros(order, smax)?;
            for (si, &z) in zeros.iter().enumerate() {
                if z > zcap {
                    break;
                }
                let lam = (z / radius).powi(2);
                modes.push((lam, m, si as u32 + 1, false));
                if m > 0 {
                    modes.push((lam, m, si as u32 + 1, true));
                }
            }
            m += 1;
        }
        if modes.len() >= count {
            modes.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .expect("finite eigenvalues")
                    .then(a.1.cmp(&b.1))
                    .then(a.2.cmp(&b.2))
                    .then(a.3.cmp(&b.3))
            });
            modes.truncate(count);
            break modes;
        }
        zcap *= 1.5;
    };

    let mut sampled = Vec::with_capacity(modes.len());
    for (lam, m, s, is_sin) in modes {
        let order = BesselOrder::new(m as f64)?;
        let z = bessel_zeros(order, s as usize)?[s as usize - 1];
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let p = grid.position(i);
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let radial = bessel_j(order, z * r / radius)?;
            let angular = if m == 0 {
                1.0
            } else {
                let theta = p[1].atan2(p[0]);
                if is_sin {
                    (m as f64 * theta).sin()
                } else {
                    (m as f64 * theta).cos()
                }
            };
            values.push(radial * angular);
        }
        sampled.push((lam, values));
    }
    finish(&grid, sampled)
}

fn sphere_spectrum(domain: &DomainSpec, count: usize) -> Result<Vec<EigenPair>> {
    let grid = Grid::build(domain)?;
    // block l contributes 2l+1 modes: (l,0), (l,1,cos), (l,1,sin), ...
    let mut modes: Vec<(f64, u32, u32, bool)> = Vec::new();
    let mut l = 0u32;
    'outer: loop {
        let lam = (l * (l + 1)) as f64;
        for m in 0..=l {
            if m == 0 {
                modes.push((lam, l, 0, false));
                if modes.len() == count {
                    break 'outer;
                }
            } else {
                modes.push((lam, l, m, false));
                if modes.len() == count {
                    break 'outer;
                }
                modes.push((lam, l, m, true));
                if modes.len() == count {
                    break 'outer;
                }
            }
        }
        l += 1;
    }

    let cos_theta: Vec<f64> = (0..grid.len())
        .map(|i| grid.angles(i).expect("sphere grid").0.cos())
        .collect();
    let phis: Vec<f64> = (0..grid.len())
        .map(|i| grid.angles(i).expect("sphere grid").1)
        .collect();

    let sampled = modes
        .into_iter()
        .map(|(lam, l, m, is_sin)| {
            let values = (0..grid.len())
                .map(|i| {
                    let p = normalized_assoc_legendre(l, m, cos_theta[i]);
                    if m == 0 {
                        p
                    } else {
                        let arg = m as f64 * phis[i];
                        std::f64::consts::SQRT_2 * p * if is_sin { arg.sin() } else { arg.cos() }
                    }
                })
                .collect();
            (lam, values)
        })
        .collect();
    finish(&grid, sampled)
}

/// The product mode `prod_d sin(2 pi m x_d / L_d)` on a flat 2-torus, with
/// amplitude 1 (not L^2-normalized).
///
/// The grid is chosen so the extrema land exactly on sample points: each
/// axis gets `2m(2K+1)` cells, which puts cell centers at the quarter-period
/// points. `index` is not meaningful for these constructed modes and is 0.
pub fn torus_sine_mode(lengths: [f64; 2], m: u32, target_resolution: u32) -> Result<EigenPair> {
    if m == 0 {
        return Err(Error::domain("torus_sine_mode", "frequency must be >= 1"));
    }
    let cells = |len: f64| -> usize {
        let target = (len * target_resolution as f64).ceil() as usize;
        let mut k = 0usize;
        loop {
            let n = 2 * m as usize * (2 * k + 1);
            if n >= target.max(4 * m as usize) {
                return n;
            }
            k += 1;
        }
    };
    let nx = cells(lengths[0]);
    let ny = cells(lengths[1]);
    let hx = lengths[0] / nx as f64;
    let hy = lengths[1] / ny as f64;
    let domain = DomainSpec::FlatTorus {
        lengths: lengths.to_vec(),
        resolution: target_resolution,
    };
    let grid = Arc::new(Grid {
        domain,
        kind: GridKind::Cart2 {
            nx,
            ny,
            hx,
            hy,
            periodic: true,
        },
        weights: WeightScheme::Uniform(hx * hy),
        total_measure: lengths[0] * lengths[1],
        len: nx * ny,
    });
    let lambda: f64 = lengths
        .iter()
        .map(|l| (2.0 * PI * m as f64 / l).powi(2))
        .sum();
    let values: Vec<f64> = (0..grid.len())
        .map(|i| {
            let p = grid.position(i);
            (2.0 * PI * m as f64 * p[0] / lengths[0]).sin()
                * (2.0 * PI * m as f64 * p[1] / lengths[1]).sin()
        })
        .collect();
    let norm_field = ScalarField::new(Arc::clone(&grid), values)?;
    let norm_l2 = super::lp_norm(&norm_field, 2.0)?;
    Ok(EigenPair {
        lambda,
        index: 0,
        field: norm_field,
        norm_l2,
    })
}

/// Zonal harmonic `Y_l^0` on the sphere, L^2-normalized analytically;
/// `index` is its 1-based position in the full spectrum ordering.
pub fn sphere_zonal_mode(l: u32, n_lat: u32) -> Result<EigenPair> {
    let domain = DomainSpec::SphereS2 { n_lat };
    let grid = Grid::build(&domain)?;
    let values: Vec<f64> = (0..grid.len())
        .map(|i| {
            let (theta, _) = grid.angles(i).expect("sphere grid");
            normalized_assoc_legendre(l, 0, theta.cos())
        })
        .collect();
    let field = ScalarField::new(Arc::clone(&grid), values)?;
    let norm_l2 = super::lp_norm(&field, 2.0)?;
    Ok(EigenPair {
        lambda: (l * (l + 1)) as f64,
        index: (l * l + 1) as usize,
        field,
        norm_l2,
    })
}

/// Sectoral harmonic `Y_l^l` (cosine variant) on the sphere.
pub fn sphere_sectoral_mode(l: u32, n_lat: u32) -> Result<EigenPair> {
    let domain = DomainSpec::SphereS2 { n_lat };
    let grid = Grid::build(&domain)?;
    let values: Vec<f64> = (0..grid.len())
        .map(|i| {
            let (theta, phi) = grid.angles(i).expect("sphere grid");
            let p = normalized_assoc_legendre(l, l, theta.cos());
            if l == 0 {
                p
            } else {
                std::f64::consts::SQRT_2 * p * (l as f64 * phi).cos()
            }
        })
        .collect();
    let field = ScalarField::new(Arc::clone(&grid), values)?;
    let norm_l2 = super::lp_norm(&field, 2.0)?;
    Ok(EigenPair {
        lambda: (l * (l + 1)) as f64,
        index: if l == 0 { 1 } else { ((l + 1) * (l + 1) - 1) as usize },
        field,
        norm_l2,
    })
}

/// The lowest `count` Neumann modes `cos(k pi x / w) cos(l pi y / h)` of a
/// rectangle, L^2-normalized, constant mode included (mu_1 = 0).
pub fn rectangle_neumann_modes(
    width: f64,
    height: f64,
    count: usize,
    resolution: u32,
) -> Result<Vec<EigenPair>> {
    if count == 0 || count > MAX_EIGEN_COUNT {
        return Err(Error::domain(
            "rectangle_neumann_modes",
            format!("count must be in 1..={MAX_EIGEN_COUNT}, got {count}"),
        ));
    }
    let domain = DomainSpec::Rectangle {
        width,
        height,
        resolution,
    };
    let grid = Grid::build(&domain)?;
    let mut cap = ((PI / width).powi(2) + (PI / height).powi(2)) * 4.0;
    let modes = loop {
        let mut modes: Vec<(f64, u32, u32)> = Vec::new();
        let mut k = 0u32;
        while (k as f64 * PI / width).powi(2) <= cap {
            let lx = (k as f64 * PI / width).powi(2);
            let mut l = 0u32;
            loop {
                let lam = lx + (l as f64 * PI / height).powi(2);
                if lam > cap {
                    break;
                }
                modes.push((lam, k, l));
                l += 1;
            }
            k += 1;
        }
        if modes.len() >= count {
            modes.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .expect("finite eigenvalues")
                    .then(a.1.cmp(&b.1))
                    .then(a.2.cmp(&b.2))
            });
            modes.truncate(count);
            break modes;
        }
        cap *= 2.0;
    };
    let sampled = modes
        .into_iter()
        .map(|(lam, k, l)| {
            let values = (0..grid.len())
                .map(|i| {
                    let p = grid.position(i);
                    (k as f64 * PI * p[0] / width).cos() * (l as f64 * PI * p[1] / height).cos()
                })
                .collect();
            (lam, values)
        })
        .collect();
    finish(&grid, sampled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::lp_norm;
    use approx::assert_relative_eq;

    #[test]
    fn square_dirichlet_eigenvalues() {
        let d = DomainSpec::rectangle(PI, PI).with_resolution(32);
        let pairs = analytic_spectrum(&d, 4).unwrap();
        let lams: Vec<f64> = pairs.iter().map(|p| p.lambda).collect();
        assert_relative_eq!(lams[0], 2.0, max_relative = 1e-12);
        assert_relative_eq!(lams[1], 5.0, max_relative = 1e-12);
        assert_relative_eq!(lams[2], 5.0, max_relative = 1e-12);
        assert_relative_eq!(lams[3], 8.0, max_relative = 1e-12);
        for p in &pairs {
            assert_relative_eq!(lp_norm(&p.field, 2.0).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sphere_block_l3_has_multiplicity_7() {
        let d = DomainSpec::SphereS2 { n_lat: 32 };
        let pairs = analytic_spectrum(&d, 16).unwrap();
        let block: Vec<&EigenPair> = pairs.iter().filter(|p| p.lambda == 12.0).collect();
        assert_eq!(block.len(), 7);
        // spectrum starts with the constant mode
        assert_eq!(pairs[0].lambda, 0.0);
        assert!(pairs.windows(2).all(|w| w[0].lambda <= w[1].lambda));
    }

    #[test]
    fn torus_product_mode_eigenvalue_and_amplitude() {
        for m in [1u32, 3] {
            let pair = torus_sine_mode([2.0 * PI, 2.0 * PI], m, 64).unwrap();
            assert_relative_eq!(pair.lambda, 2.0 * (m as f64).powi(2), max_relative = 1e-12);
            let sup = lp_norm(&pair.field, f64::INFINITY).unwrap();
            assert_eq!(sup, 1.0, "peaks must land exactly on grid points");
        }
    }

    #[test]
    fn torus_mode_normalization_factor() {
        // sin(x) sin(y) on [0, 2pi)^2 has L^2 norm pi
        let pair = torus_sine_mode([2.0 * PI, 2.0 * PI], 1, 64).unwrap();
        assert_relative_eq!(pair.norm_l2, PI, max_relative = 1e-10);
        let normalized = normalize(&pair).unwrap();
        let sup = lp_norm(&normalized.field, f64::INFINITY).unwrap();
        assert_relative_eq!(sup, 1.0 / PI, max_relative = 1e-10);
    }

    #[test]
    fn disk_ground_state_is_j0_zero_squared() {
        let d = DomainSpec::disk(1.0).with_resolution(48);
        let pairs = analytic_spectrum(&d, 3).unwrap();
        let j0 = crate::specfun::bessel_first_zero(BesselOrder::new(0.0).unwrap()).unwrap();
        assert_relative_eq!(pairs[0].lambda, j0 * j0, max_relative = 1e-10);
        // the next eigenvalue comes with multiplicity 2
        assert_relative_eq!(pairs[1].lambda, pairs[2].lambda, max_relative = 1e-12);
        // sup of the normalized ground state is at the center
        let sup = lp_norm(&pairs[0].field, f64::INFINITY).unwrap();
        let center_value = pairs[0]
            .field
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let p = pairs[0].field.grid().position(i);
                (p[0] * p[0] + p[1] * p[1], v)
            })
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .unwrap()
            .1;
        assert_relative_eq!(sup, center_value.abs(), max_relative = 1e-9);
    }

    #[test]
    fn neumann_family_starts_with_constant() {
        let pairs = rectangle_neumann_modes(PI, PI, 6, 24).unwrap();
        assert_eq!(pairs[0].lambda, 0.0);
        let spread = pairs[0]
            .field
            .values()
            .iter()
            .fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        assert_relative_eq!(spread.0, spread.1, max_relative = 1e-12);
        assert_relative_eq!(pairs[1].lambda, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn zonal_and_sectoral_modes() {
        let z = sphere_zonal_mode(4, 48).unwrap();
        assert_eq!(z.lambda, 20.0);
        assert_eq!(z.index, 17);
        let s = sphere_sectoral_mode(4, 48).unwrap();
        assert_eq!(s.lambda, 20.0);
        assert_eq!(s.index, 24);
    }
}
