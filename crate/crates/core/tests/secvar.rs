use std::f64::consts::PI;

use okstab::secvar::threshold::stability_threshold_k_up_to;
use okstab::secvar::{
    assemble_boundary_form, constrained_min_eig, constrained_min_eig_with, finite_difference_check, lamella_form_value,
    lamella_min_eigenvalue, lamella_mode_matrix, mode_direction, stability_threshold_gamma, ConstraintOptions,
};
use okstab::shape::{boundary_mesh, Lamella};
use okstab::{ShapeConfig, TorusGrid};
use proptest::prelude::*;

mod common;
use common::{oracle_min_eigenvalue, oracle_mode_matrix};

#[test]
fn pure_dirichlet_form_on_a_circle() {
    // ∫|φ'|² alone has eigenvalues l²/r²; the mean (l = 0) and the two
    // translation traces (l = 1) are projected out, leaving 4/r²
    let r = 0.2;
    let shape = ShapeConfig::droplet(&[0.5, 0.5], r).unwrap();
    let mut form = assemble_boundary_form(&boundary_mesh(&shape, 128).unwrap(), 0.0).unwrap();
    form.matrix = form.dirichlet.clone();
    let c = constrained_min_eig(&form).unwrap();
    assert!(
        (c.min_eigenvalue * r * r / 4.0 - 1.0).abs() < 1e-2,
        "{}",
        c.min_eigenvalue * r * r
    );
}

#[test]
fn assembled_forms_are_symmetric() {
    for (shape, gamma) in [
        (ShapeConfig::droplet(&[0.4, 0.55], 0.22).unwrap(), 5.0),
        (ShapeConfig::lamella(2, 0.2, 1, 2).unwrap(), 40.0),
    ] {
        let f = assemble_boundary_form(&boundary_mesh(&shape, 96).unwrap(), gamma).unwrap();
        let asym = (&f.matrix - f.matrix.transpose()).abs().max();
        assert!(asym <= 1e-12 * f.matrix.abs().max(), "{asym:e}");
    }
}

#[test]
fn translations_are_null_directions() {
    let cases = [
        (ShapeConfig::lamella(1, 0.0, 1, 2).unwrap(), 30.0),
        (ShapeConfig::lamella(3, -0.3, 1, 2).unwrap(), 120.0),
        (ShapeConfig::droplet(&[0.5, 0.5], 0.3).unwrap(), 0.0),
    ];
    for (shape, gamma) in cases {
        let f = assemble_boundary_form(&boundary_mesh(&shape, 128).unwrap(), gamma).unwrap();
        for e in [[1.0, 0.0], [0.0, 1.0]] {
            let phi = f.normal_trace(e);
            let mass = f.l2_norm_sq(&phi);
            if mass < 1e-12 {
                continue;
            }
            let rel = f.value(&phi).abs() / (mass * f.scale());
            assert!(rel <= 1e-6, "{shape:?} e={e:?}: {rel:e}");
        }
    }
    // and exactly in the mode matrix: 8γa(1-a) from the kernel cancels 4γ·2∂_νv
    for k in 1..5 {
        let mm = lamella_mode_matrix(k, 0.1, 77.0, 0.0).unwrap();
        let phi: Vec<f64> = (0..2 * k).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect();
        assert!(mm.quadratic(&phi).abs() < 1e-12, "k={k}");
    }
}

#[test]
fn boundary_form_decouples_into_lateral_modes() {
    for &(k, m, gamma) in &[(1, 0.0, 50.0), (2, 0.2, 150.0), (1, -0.3, 110.0)] {
        let shape = ShapeConfig::lamella(k, m, 1, 2).unwrap();
        let f = assemble_boundary_form(&boundary_mesh(&shape, 96).unwrap(), gamma).unwrap();
        let c = constrained_min_eig_with(
            &f,
            ConstraintOptions {
                per_component_mean: true,
            },
        )
        .unwrap();
        let exact = lamella_min_eigenvalue(k, m, gamma, 1, 2).unwrap().min_eigenvalue;
        assert!(
            (c.min_eigenvalue - exact).abs() <= 0.01 * exact.abs(),
            "{} vs {exact}",
            c.min_eigenvalue
        );
    }
}

#[test]
fn mode_matrices_match_the_independent_construction() {
    for &(k, m, gamma) in &[(1, 0.0, 10.0), (3, 0.4, 200.0), (5, -0.2, 1e3)] {
        for q in 1..=6 {
            let lib = lamella_mode_matrix(k, m, gamma, q as f64).unwrap().matrix;
            let ora = oracle_mode_matrix(k, m, gamma, q as f64);
            assert!((lib - &ora).abs().max() <= 1e-10 * ora.abs().max());
        }
    }
}

#[test]
fn gamma_threshold_bracket_is_confirmed_independently() {
    for &(k, m) in &[(1, 0.0), (2, 0.0), (1, 0.25)] {
        let t = stability_threshold_gamma(m, k, 2).unwrap();
        let (lo, hi) = t.bracket.unwrap();
        assert!(hi - lo <= 1e-6);
        assert!(oracle_min_eigenvalue(k, m, lo, 20) > 0.0, "k={k} m={m} at {lo}");
        assert!(oracle_min_eigenvalue(k, m, hi, 20) < 0.0, "k={k} m={m} at {hi}");
    }
}

#[test]
fn strip_counts_above_k0_stay_stable() {
    for &(m, gamma) in &[(0.0, 300.0), (0.0, 3000.0), (0.3, 800.0), (-0.4, 5000.0)] {
        let t = stability_threshold_k_up_to(m, gamma, 2, 50).unwrap();
        let k0 =
            t.k0.unwrap_or_else(|| panic!("no stable k up to 50 at m={m}, γ={gamma}"));
        for k in k0..=50 {
            let r = lamella_min_eigenvalue(k, m, gamma, 1, 2).unwrap();
            assert!(r.min_eigenvalue > 0.0, "m={m} γ={gamma} k={k}");
            assert!(oracle_min_eigenvalue(k, m, gamma, 20) > 0.0, "m={m} γ={gamma} k={k}");
        }
        if k0 > 1 {
            assert!(lamella_min_eigenvalue(k0 - 1, m, gamma, 1, 2).unwrap().min_eigenvalue < 0.0);
        }
    }
}

#[test]
fn normal_derivative_scales_like_one_over_k() {
    for k in 1..=4 {
        for &m in &[-0.4, 0.0, 0.5] {
            let shape = ShapeConfig::lamella(k, m, 1, 2).unwrap();
            let f = assemble_boundary_form(&boundary_mesh(&shape, 64).unwrap(), 1.0).unwrap();
            let a = 0.5 * (m + 1.0);
            let exact = -a * (1.0 - a) / k as f64;
            for d in &f.normal_derivative {
                assert!((d - exact).abs() <= 1e-8, "k={k} m={m}: {d} vs {exact}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn second_differences_follow_the_sign_of_the_form(
        k in 1usize..3,
        m in -0.3..0.3f64,
        gamma in 0.0..250.0f64,
        q in 1usize..4,
        j in 0usize..4,
    ) {
        let base = Lamella { k, m, axis: 1, dim: 2 };
        // the t⁴ remainder is not small against a form that nearly cancels,
        // so t stays small, and the grid must resolve a displacement of 0.005
        let n = 256;
        let grid = TorusGrid::new(&[n, n]).unwrap();
        let j = j % (2 * k);
        let psi: Vec<Vec<f64>> = (0..2 * k)
            .map(|i| (0..n).map(|l| if i == j { (2.0 * PI * (q * l) as f64 / n as f64).cos() } else { 0.0 }).collect())
            .collect();
        let r = finite_difference_check(base, &psi, gamma, &[0.01, 0.005], &grid).unwrap();
        // curvature part of the form alone is 4π²q²‖ψ‖² = 2π²q²
        prop_assume!(r.form_value.abs() > 2e-3 * PI * PI * (q * q) as f64);
        prop_assert!((r.ratio - 1.0).abs() < 0.01, "ratio {}", r.ratio);
        let report = lamella_min_eigenvalue(k, m, gamma, 1, 2).unwrap();
        if report.min_eigenvalue > 0.0 {
            prop_assert!(r.extrapolated > 0.0);
        }
    }
}

#[test]
fn critical_mode_lowers_the_energy_when_unstable() {
    let base = Lamella {
        k: 1,
        m: 0.0,
        axis: 1,
        dim: 2,
    };
    let gamma = 120.0;
    let report = lamella_min_eigenvalue(1, 0.0, gamma, 1, 2).unwrap();
    assert!(report.min_eigenvalue < 0.0);
    let n = 128;
    let psi = mode_direction(base, &report, n).unwrap();
    let r = finite_difference_check(base, &psi, gamma, &[0.04, 0.02], &TorusGrid::new(&[n, n]).unwrap()).unwrap();
    assert!(r.second_differences.iter().all(|&d| d < 0.0));
    // the form on the mode equals λ·‖φ‖²
    let phi: Vec<Vec<f64>> = psi
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let o = if i % 2 == 0 { -1.0 } else { 1.0 };
            row.iter().map(|v| o * v).collect()
        })
        .collect();
    let norm: f64 = phi.iter().flatten().map(|v| v * v).sum::<f64>() / n as f64;
    let val = lamella_form_value(1, 0.0, gamma, &phi).unwrap();
    assert!(
        (val / norm - report.min_eigenvalue).abs() < 1e-8 * report.min_eigenvalue.abs(),
        "{val} {norm}"
    );
}
