//! Randomized invariants across modules.

use std::f64::consts::PI;

use faer::linalg::solvers::Solve;
use faer::{Col, Mat};
use num_complex::Complex64;
use proptest::prelude::*;

use transmission_bie::geometry::{sample, GeometryKind};
use transmission_bie::gmres::gmres_solve;
use transmission_bie::mie::{mie_far_field, mie_solve_with};
use transmission_bie::operators::{
    apply_dense, assemble_sigma, assemble_single_layer, symbol_hypersingular, symbol_single, OperatorKind, Wavenumber,
};
use transmission_bie::postprocess::{far_field, FarField};
use transmission_bie::properties::{run_properties, PropertyOptions};
use transmission_bie::specfun::{bessel_j, bessel_j_deriv, bessel_y, bessel_y_deriv, hankel1};
use transmission_bie::{solve, Formulation, Polarization, TransmissionConfig};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn geometry() -> impl Strategy<Value = GeometryKind> {
    prop_oneof![
        Just(GeometryKind::Circle),
        Just(GeometryKind::Kite),
        Just(GeometryKind::Cavity)
    ]
}

fn cheap() -> ProptestConfig {
    ProptestConfig::with_cases(12)
}

proptest! {
    #[test]
    fn bessel_recurrence_and_wronskian(re in 0.2f64..40.0, im in 0.0f64..4.0, n in 1u32..25) {
        let z = c(re, im);
        for f in [bessel_j, hankel1] {
            let (a, b, d) = (f(n - 1, z).unwrap(), f(n, z).unwrap(), f(n + 1, z).unwrap());
            let scale = a.norm().max(b.norm()).max(d.norm());
            prop_assert!((a + d - b * (2.0 * n as f64) / z).norm() <= 1e-11 * scale);
        }
        let w = bessel_j(n, z).unwrap() * bessel_y_deriv(n, z).unwrap() - bessel_j_deriv(n, z).unwrap() * bessel_y(n, z).unwrap();
        let exact = c(2.0 / PI, 0.0) / z;
        prop_assert!((w - exact).norm() <= 1e-9 * exact.norm());
    }

    #[test]
    fn symbols_have_positive_imaginary_part(re in 0.1f64..200.0, im in 0.01f64..50.0, m in -100_000i64..100_000) {
        let kappa = c(re, im);
        prop_assert!(symbol_single(m as f64, kappa).im > 0.0);
        prop_assert!(symbol_hypersingular(m as f64, kappa).im > 0.0);
        let prod = symbol_single(m as f64, kappa) * symbol_hypersingular(m as f64, kappa);
        prop_assert!((prod + 0.25).norm() < 1e-14);
    }

    #[test]
    fn sampled_normals_are_unit_and_outward(g in geometry(), n in 8usize..80) {
        let nodes = sample(&g.curve(), n).unwrap();
        prop_assert_eq!(nodes.len(), 2 * n);
        for (p, nu) in nodes.pos.iter().zip(&nodes.normal) {
            prop_assert!((nu[0].hypot(nu[1]) - 1.0).abs() < 1e-12);
            let step = 1e-3;
            let outside = [p[0] + step * nu[0], p[1] + step * nu[1]];
            prop_assert!(nodes.winding_number(outside).abs() < 0.5);
        }
    }
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn circle_single_layer_eigenvalues(re in 0.3f64..6.0, im in 0.0f64..2.0, m in -12i64..=12) {
        let k = c(re, im);
        let nodes = sample(&GeometryKind::Circle.curve(), 48).unwrap();
        let s = assemble_single_layer(&nodes, Wavenumber::new(k).unwrap()).unwrap();
        let o = m.unsigned_abs() as u32;
        let lambda = c(0.0, PI / 2.0) * bessel_j(o, k).unwrap() * hankel1(o, k).unwrap();
        let e: Vec<Complex64> = nodes.t.iter().map(|&t| Complex64::from_polar(1.0, m as f64 * t)).collect();
        let y = apply_dense(&s.entries, &e).unwrap();
        for (a, b) in y.iter().zip(&e) {
            prop_assert!((a - b * lambda).norm() < 1e-10);
        }
    }

    #[test]
    fn sigma_product_is_minus_quarter_identity(g in geometry(), re in 0.5f64..20.0, im in 0.1f64..10.0) {
        let nodes = sample(&g.curve(), 24).unwrap();
        let kappa = Wavenumber::complexified(c(re, im)).unwrap();
        let prod = &assemble_sigma(&nodes, OperatorKind::SigmaN, kappa).unwrap().entries
            * &assemble_sigma(&nodes, OperatorKind::SigmaS, kappa).unwrap().entries;
        for i in 0..nodes.len() {
            for j in 0..nodes.len() {
                let want = if i == j { -0.25 } else { 0.0 };
                prop_assert!((prod[(i, j)] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gmres_matches_direct_solve(seed in 0u64..1000, dim in 5usize..60) {
        // identity plus a small random perturbation: well conditioned
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a = Mat::<Complex64>::from_fn(dim, dim, |i, j| {
            c(next(), next()) * (0.5 / dim as f64) + if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }
        });
        let b: Vec<Complex64> = (0..dim).map(|_| c(next(), next())).collect();
        let report = gmres_solve(&a, &b, 1e-12).unwrap();
        let direct = a.partial_piv_lu().solve(&Col::from_fn(dim, |i| b[i]));
        let scale = (0..dim).map(|i| direct[i].norm()).fold(0.0, f64::max);
        for i in 0..dim {
            prop_assert!((report.solution[i] - direct[i]).norm() <= 1e-10 * scale);
        }
        prop_assert!(report.iterations <= dim);
    }

    #[test]
    fn mie_satisfies_transmission_conditions(k1 in 0.5f64..20.0, contrast in 1.1f64..16.0, h in any::<bool>(), angle in 0.0f64..(2.0 * PI)) {
        let k2 = k1 * contrast.sqrt();
        let nu = if h { 1.0 / contrast } else { 1.0 };
        let sol = mie_solve_with(1.0, k1, k2, nu, angle, None).unwrap();
        for t in sol.boundary_traces(&FarField::angles(32)).unwrap() {
            prop_assert!((t[0] - t[2]).norm() <= 1e-11 * t[0].norm().max(1.0));
            prop_assert!((t[1] - t[3] * nu).norm() <= 1e-11 * t[1].norm().max(1.0));
        }
        // energy balance
        let ff = mie_far_field(&sol, &FarField::angles(1024));
        let total: f64 = ff.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * 2.0 * PI / 1024.0;
        let theorem = -(8.0 * PI / k1).sqrt() * (Complex64::from_polar(1.0, PI / 4.0) * sol.far_field_at(angle)).re;
        prop_assert!((total - theorem).abs() <= 1e-9 * total.max(1e-300));
    }

    #[test]
    fn zero_contrast_scatters_nothing(g in geometry(), f in prop_oneof![
        Just(Formulation::Sk14), Just(Formulation::Sk15), Just(Formulation::Fk16),
        Just(Formulation::SkrLp), Just(Formulation::SkrPs)
    ], omega in 1.0f64..8.0) {
        let mut config = TransmissionConfig::new(g, f, omega, 1.0, Polarization::E, 64);
        config.tol = 1e-10;
        let ff = far_field(&solve(&config).unwrap()).unwrap();
        // residue: GMRES tolerance plus the cavity's discretization floor (~3e-8 here)
        prop_assert!(ff.amplitudes.iter().all(|a| a.norm() < 1e-7));
    }
}

#[test]
fn property_suite_is_clean() {
    let records = run_properties(&PropertyOptions::default());
    let failed: Vec<_> = records
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}: {}", r.module, r.property))
        .collect();
    assert!(failed.is_empty(), "{failed:?}");
}

#[test]
fn property_suite_detects_a_corrupted_kernel() {
    let records = run_properties(&PropertyOptions {
        diagonal_fault: Some(1e-3),
        ..PropertyOptions::default()
    });
    assert!(records.iter().any(|r| !r.pass && r.property.contains("Calderon")));
}

#[test]
fn property_suite_rejects_real_kappa() {
    let records = run_properties(&PropertyOptions {
        kappa1: c(2.0, 0.0),
        ..PropertyOptions::default()
    });
    assert!(records.iter().any(|r| !r.pass && r.property.contains("admissibility")));
}
