//! Cross-module integration checks that exercise the solver pipelines end
//! to end on the model domains.

use nodal_lab_core::bounds::check_neumann;
use nodal_lab_core::nodal::{decompose, default_zero_tolerance};
use nodal_lab_core::spectra::{
    analytic_spectrum, apply_discrete_laplacian, fd_spectrum, BoundaryCondition, DomainSpec,
    MaskShape,
};
use std::f64::consts::PI;

fn lshape(h: f64) -> DomainSpec {
    DomainSpec::MaskedGrid {
        shape: MaskShape::LShape { arm: 1.0 },
        h,
        bc: BoundaryCondition::Dirichlet,
    }
}

#[test]
fn lshape_ground_state_against_richardson_extrapolation() {
    // self-convergence oracle: second-order extrapolation from two coarse
    // grids predicts the fine-grid value within 2%
    let l16 = fd_spectrum(&lshape(1.0 / 16.0), 1).unwrap()[0].lambda;
    let l32 = fd_spectrum(&lshape(1.0 / 32.0), 1).unwrap()[0].lambda;
    let l64 = fd_spectrum(&lshape(1.0 / 64.0), 1).unwrap()[0].lambda;
    let extrapolated = l32 + (l32 - l16) / 3.0;
    let gap = (l64 - extrapolated).abs() / extrapolated;
    assert!(
        gap < 0.02,
        "lambda_1(h=1/64) = {l64} vs Richardson {extrapolated} (gap {gap})"
    );
}

#[test]
fn fd_square_eigenvalue_table_converges_at_second_order() {
    let errors = |h: f64| -> Vec<f64> {
        let d = DomainSpec::MaskedGrid {
            shape: MaskShape::Rectangle {
                width: 1.0,
                height: 1.0,
            },
            h,
            bc: BoundaryCondition::Dirichlet,
        };
        let pairs = fd_spectrum(&d, 5).unwrap();
        let exact = [2.0, 5.0, 5.0, 8.0, 10.0].map(|s| s * PI * PI);
        pairs
            .iter()
            .zip(exact)
            .map(|(p, want)| (p.lambda - want).abs())
            .collect()
    };
    let coarse = errors(1.0 / 16.0);
    let fine = errors(1.0 / 32.0);
    for (k, (e1, e2)) in coarse.iter().zip(&fine).enumerate() {
        assert!(
            e2 * 3.5 <= *e1,
            "eigenvalue {k}: errors {e1} -> {e2} not contracting at second order"
        );
    }
}

#[test]
fn fd_pairs_satisfy_the_residual_contract() {
    let pairs = fd_spectrum(&lshape(1.0 / 24.0), 8).unwrap();
    for p in &pairs {
        let lap = apply_discrete_laplacian(&p.field).unwrap();
        let mut res = 0.0f64;
        let mut norm = 0.0f64;
        for (i, &v) in p.field.values().iter().enumerate() {
            let r = lap[i] - p.lambda * v;
            res += r * r;
            norm += v * v;
        }
        let rel = (res / norm).sqrt();
        assert!(rel <= 1e-8, "index {}: residual {rel}", p.index);
    }
}

#[test]
fn disk_neumann_fd_family_has_linear_extrema_growth() {
    let d = DomainSpec::MaskedGrid {
        shape: MaskShape::Disk { radius: 1.0 },
        h: 1.0 / 16.0,
        bc: BoundaryCondition::Neumann,
    };
    let pairs = fd_spectrum(&d, 40).unwrap();
    assert!(pairs[0].lambda.abs() < 1e-8, "mu_1 = {}", pairs[0].lambda);
    let decomps: Vec<_> = pairs
        .iter()
        .map(|p| decompose(p, default_zero_tolerance(p).unwrap()).unwrap())
        .collect();
    let check = check_neumann(&decomps).unwrap();
    assert!(
        check.sum_fit.slope <= 1.1,
        "sum slope {}",
        check.sum_fit.slope
    );
    assert!(check.sq_fit.slope <= 1.1, "sq slope {}", check.sq_fit.slope);
}

#[test]
fn closed_manifold_modes_have_small_discrete_mean() {
    // torus trig products integrate to zero exactly on the uniform grid
    let torus = analytic_spectrum(&DomainSpec::torus2(2.0 * PI, 2.0 * PI).with_resolution(32), 9)
        .unwrap();
    for p in torus.iter().skip(1) {
        assert!(
            p.field.mean().abs() <= 1e-8,
            "torus mode {}: mean {}",
            p.index,
            p.field.mean()
        );
    }
    // the latitude rule is midpoint, not Gauss, so zonal harmonics carry an
    // O(dtheta^2) quadrature remainder; assert at that scale
    let sphere = analytic_spectrum(&DomainSpec::SphereS2 { n_lat: 128 }, 16).unwrap();
    for p in sphere.iter().skip(1) {
        assert!(
            p.field.mean().abs() <= 1e-3,
            "sphere mode {}: mean {}",
            p.index,
            p.field.mean()
        );
    }
}
