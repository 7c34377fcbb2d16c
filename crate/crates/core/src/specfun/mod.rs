//! Special functions and quadrature behind every explicit constant in the
//! bound checks: Bessel J of real order, its zeros, unit-ball volumes, and
//! adaptive Gauss-Legendre integration.
//!
//! Everything here is a pure function of its inputs and safe to call
//! concurrently.

mod bessel;
mod gamma;
mod quad;

pub use bessel::{bessel_first_zero, bessel_j, bessel_j_prime, bessel_zeros, BesselOrder};
pub use gamma::{gamma, ln_gamma};
pub use quad::{integrate, integrate_with_error, QuadratureRule};

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Volume of the n-dimensional unit ball, `pi^{n/2} / Gamma(n/2 + 1)`.
pub fn unit_ball_volume(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("unit_ball_volume", "dimension must be >= 1"));
    }
    let half = n as f64 / 2.0;
    Ok(PI.powf(half) / gamma(half + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_ball_volumes_in_low_dimensions() {
        assert_relative_eq!(unit_ball_volume(1).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(unit_ball_volume(2).unwrap(), PI, max_relative = 1e-14);
        assert_relative_eq!(
            unit_ball_volume(3).unwrap(),
            4.0 * PI / 3.0,
            max_relative = 1e-14
        );
        assert!(unit_ball_volume(0).is_err());
    }

    #[test]
    fn unit_ball_volume_recursion() {
        // alpha_n = alpha_{n-2} * 2 pi / n
        for n in 3..=12u32 {
            let lhs = unit_ball_volume(n).unwrap();
            let rhs = unit_ball_volume(n - 2).unwrap() * 2.0 * PI / n as f64;
            assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
        }
    }
}
