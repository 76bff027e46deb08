use num_complex::Complex64;
use overhang_core::linear::*;
use overhang_core::spectral::{HolomorphicBoundaryFn, SpectralGrid};
use proptest::prelude::*;

#[test]
fn zero_amplitude_operator() {
    let g = SpectralGrid::new(64).unwrap();
    assert!(
        apply_l(&g, 0.0, &HolomorphicBoundaryFn::monomial(1, 8))
            .unwrap()
            .max_abs()
            < 1e-15
    );
    let m = assemble_l_matrix(0.0, 8).unwrap();
    let mut e1 = nalgebra::DVector::zeros(9);
    e1[1] = 1.0;
    assert!((&m.entries * e1).norm() < 1e-14);
    assert!(m.min_singular_value() < 1e-12);
}

#[test]
fn factorization_of_the_linearization() {
    let g = SpectralGrid::new(512).unwrap();
    for a in [0.1, 0.3, 0.45] {
        for n in 0..=8 {
            let r = factorization_residual(&g, a, &HolomorphicBoundaryFn::monomial(n, 8)).unwrap();
            assert!(r < 1e-9, "A = {a}, n = {n}: {r:e}");
        }
    }
}

#[test]
fn smallest_singular_values() {
    for k in 0..9 {
        let a = 0.05 + 0.05 * k as f64;
        let s = assemble_l_matrix(a, 64).unwrap().min_singular_value();
        assert!(s > 1e-3, "A = {a}: {s:e}");
    }
    let s32 = assemble_l_matrix(0.3, 32).unwrap().min_singular_value();
    let s64 = assemble_l_matrix(0.3, 64).unwrap().min_singular_value();
    assert!(((s32 - s64) / s64).abs() < 0.05, "{s32} vs {s64}");
}

#[test]
fn principal_coefficient_stays_away_from_zero() {
    assert!(principal_coefficient_inf(0.45, 2048).unwrap() > 0.0);
    let g = SpectralGrid::new(64).unwrap();
    for n in 0..6 {
        let v = HolomorphicBoundaryFn::monomial(n, 8);
        let l0 = apply_l0(&g, 0.0, &v).unwrap();
        let e = overhang_core::GridFn::from_fn(64, |a| n as f64 * (n as f64 * a).cos());
        assert!(l0.max_abs_diff(&e) < 1e-13);
    }
}

#[test]
fn residue_calculus_at_reference_amplitudes() {
    for a in [0.2, 0.3, 0.4] {
        let rep = lemma_checks(a, Complex64::i()).unwrap();
        for name in [
            "res_p_at_A",
            "res_p_at_minus_A",
            "res_q_at_minus_A",
            "res_p_at_0",
            "final_identity",
        ] {
            let it = rep.item(name).unwrap();
            assert!(it.error < 1e-10, "A = {a}: {name} off by {:e}", it.error);
        }
        assert!(rep.max_error() < 1e-10);
        assert_eq!((rep.verdict.exponent, rep.verdict.sign), (2, 1.0));
    }
}

#[test]
fn residue_of_q_vanishes_after_substitution() {
    let a = 0.3;
    let v = Complex64::new(0.0, 0.7);
    let f = f_minus1_candidate(a, v, 1.0, 2).re;
    let r = contour_residue(
        |z| ode_q(a, v, f, z),
        Complex64::new(a, 0.0),
        default_radius(a, Complex64::new(a, 0.0)),
    )
    .unwrap();
    assert!(r.norm() < 1e-12);
    let cubic = f_minus1_candidate(a, v, -1.0, 3).re;
    let r = contour_residue(|z| ode_q(a, v, cubic, z), Complex64::new(a, 0.0), 0.1).unwrap();
    assert!(r.norm() > 1e-3);
}

#[test]
fn closed_form_coefficients() {
    let c = ode_coefficients(0.3, Complex64::i(), 0.0).unwrap();
    assert!((c.p_res_0.re - 0.834_862_385_321_100_9).abs() < 1e-15);
    assert_eq!(c.p_res_a, Complex64::new(0.0, 0.0));
    let c = ode_coefficients(0.2, Complex64::new(1.0, 0.0), 0.0).unwrap();
    assert!((c.holomorphy_combination() - 4.0 / (0.96f64 * 0.96)).norm() < 1e-11);
    assert!(ode_coefficients(0.0, Complex64::i(), 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn residue_identities_hold(a in 0.05f64..0.48, v in -3.0f64..3.0) {
        let rep = lemma_checks(a, Complex64::new(0.0, v)).unwrap();
        let scale = 1.0 + v.abs() / (a * a * (1.0 - a * a).powi(2));
        prop_assert!(rep.max_error() < 1e-10 * scale, "{:?}", rep.items);
        prop_assert_eq!(rep.verdict.exponent, 2);
        prop_assert!(rep.res_p_at_0_in_unit_interval);
        let mu = rep.monodromy_exponent;
        prop_assert!(mu < 0.0 && mu > -1.0);
    }

    #[test]
    fn factorization_holds_for_mixed_directions(a in 0.05f64..0.45, c in prop::collection::vec(-1.0f64..1.0, 1..8)) {
        let g = SpectralGrid::new(256).unwrap();
        let v = HolomorphicBoundaryFn::new(c);
        prop_assert!(factorization_residual(&g, a, &v).unwrap() < 1e-9);
    }
}
