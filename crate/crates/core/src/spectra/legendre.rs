//! Fully normalized associated Legendre functions for real spherical
//! harmonics on the unit sphere.

/// `Pbar_l^m(x)` with the normalization that makes
/// `Y_l0 = Pbar_l^0(cos theta)` and
/// `Y_lm = sqrt(2) Pbar_l^m(cos theta) {cos, sin}(m phi)` an orthonormal
/// family in L^2 of the sphere.
pub fn normalized_assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    assert!(m <= l, "order m={m} exceeds degree l={l}");
    let s = (1.0 - x * x).max(0.0).sqrt();
    // seed: Pbar_m^m
    let mut pmm = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    for k in 1..=m {
        let kf = k as f64;
        pmm *= s * ((2.0 * kf + 1.0) / (2.0 * kf)).sqrt();
    }
    if l == m {
        return pmm;
    }
    // Pbar_{m+1}^m
    let mut p_prev = pmm;
    let mut p = (2.0 * m as f64 + 3.0).sqrt() * x * pmm;
    if l == m + 1 {
        return p;
    }
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let mf = m as f64;
        let a = ((2.0 * lf - 1.0) * (2.0 * lf + 1.0) / ((lf - mf) * (lf + mf))).sqrt();
        let b = ((2.0 * lf + 1.0) * (lf + mf - 1.0) * (lf - mf - 1.0)
            / ((lf - mf) * (lf + mf) * (2.0 * lf - 3.0)))
            .sqrt();
        let next = a * x * p - b * p_prev;
        p_prev = p;
        p = next;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn low_degree_closed_forms() {
        let n00 = (1.0 / (4.0 * PI)).sqrt();
        assert!((normalized_assoc_legendre(0, 0, 0.3) - n00).abs() < 1e-14);
        let x = 0.42;
        let want10 = (3.0 / (4.0 * PI)).sqrt() * x;
        assert!((normalized_assoc_legendre(1, 0, x) - want10).abs() < 1e-13);
        let want11 = (3.0 / (8.0 * PI)).sqrt() * (1.0f64 - x * x).sqrt();
        assert!((normalized_assoc_legendre(1, 1, x) - want11).abs() < 1e-13);
    }

    #[test]
    fn l2_normalization_by_quadrature() {
        // 2 pi * integral of Pbar^2 over [-1, 1] must be 1
        for (l, m) in [(2u32, 0u32), (3, 1), (5, 5), (8, 3), (12, 0)] {
            let n = 20_000;
            let h = 2.0 / n as f64;
            let mut sum = 0.0;
            for i in 0..n {
                let x = -1.0 + (i as f64 + 0.5) * h;
                let p = normalized_assoc_legendre(l, m, x);
                sum += p * p * h;
            }
            let total = 2.0 * PI * sum;
            assert!(
                (total - 1.0).abs() < 1e-4,
                "l={l}, m={m}: norm^2 = {total}"
            );
        }
    }

    #[test]
    fn zonal_value_at_pole() {
        for l in [1u32, 4, 9, 12] {
            let want = ((2.0 * l as f64 + 1.0) / (4.0 * PI)).sqrt();
            let got = normalized_assoc_legendre(l, 0, 1.0);
            assert!((got - want).abs() < 1e-12, "l={l}: {got} vs {want}");
        }
    }
}
