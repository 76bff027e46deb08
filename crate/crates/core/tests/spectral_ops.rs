use overhang_core::exact::{crapper_w, exact_q_closed_form, ParamSet};
use overhang_core::spectral::*;
use proptest::prelude::*;

fn even_fn(m: usize, coeffs: &[f64]) -> GridFn {
    GridFn::from_fn(m, |a| {
        coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * (n as f64 * a).cos())
            .sum()
    })
}

#[test]
fn hilbert_examples() {
    let g = SpectralGrid::new(64).unwrap();
    let h = g.hilbert(&GridFn::from_fn(64, |a| (3.0 * a).cos() + 2.0));
    assert!(h.max_abs_diff(&GridFn::from_fn(64, |a| (3.0 * a).sin())) < 1e-14);
    assert!(g.hilbert(&GridFn::from_fn(64, |_| 1.0)).max_abs() < 1e-15);
}

#[test]
fn commutator_routes_on_crapper_traces() {
    for (a, m) in [(0.1, 256), (0.3, 256), (0.45, 512)] {
        let g = SpectralGrid::new(m).unwrap();
        let y = g
            .boundary_trace(&crapper_w(a, m / 2 - 1).unwrap())
            .unwrap()
            .imag_part();
        let fft = g.commutator_q(&y);
        let quad = g.commutator_q_quadrature(&y);
        let closed = exact_q_closed_form(a, m).unwrap();
        assert!(fft.max_abs_diff(&quad) < 1e-9, "A = {a}");
        assert!(fft.max_abs_diff(&closed) < 1e-9, "A = {a}");
        assert!(quad.max_abs_diff(&closed) < 1e-9, "A = {a}");
    }
}

#[test]
fn residual_is_affine_in_bernoulli() {
    let g = SpectralGrid::new(128).unwrap();
    let mut p = ParamSet::zero_gravity(0.3).unwrap();
    p.bernoulli += 0.01;
    let r = g.residual(&crapper_w(0.3, 63).unwrap(), &p).unwrap();
    assert!(r.max_abs_diff(&GridFn::from_fn(128, |_| -0.01)) < 1e-12);
}

#[test]
fn flat_water_solves_every_gravity() {
    let g = SpectralGrid::new(32).unwrap();
    for grav in [0.0, 0.5, 7.0] {
        let p = ParamSet::with_gravity(0.0, grav).unwrap();
        assert_eq!(
            g.residual(&HolomorphicBoundaryFn::zero(8), &p)
                .unwrap()
                .max_abs(),
            0.0
        );
    }
}

#[test]
fn exact_residual_has_no_resolved_modes() {
    let g = SpectralGrid::new(512).unwrap();
    let r = g
        .residual(
            &crapper_w(0.4, 128).unwrap(),
            &ParamSet::zero_gravity(0.4).unwrap(),
        )
        .unwrap();
    assert!(g
        .project_even(&r, 128)
        .unwrap()
        .iter()
        .all(|c| c.abs() < 1e-10));
}

#[test]
fn closed_form_commutator_derivative() {
    let g = SpectralGrid::new(256).unwrap();
    let konst = HolomorphicBoundaryFn::monomial(0, 4);
    assert!(
        closed_form_qw_at_crapper(&g, 0.3, &konst)
            .unwrap()
            .max_abs()
            < 1e-15
    );

    // v = i zeta at A = 0.4 simplifies to Im(-1.6 i zeta / (zeta + 0.4))
    let v = HolomorphicBoundaryFn::monomial(1, 4);
    let q = closed_form_qw_at_crapper(&g, 0.4, &v).unwrap();
    let expect = GridFn::new(
        g.zetas()
            .iter()
            .map(|z| (-1.6 * num_complex::Complex64::i() * z / (z + 0.4)).im)
            .collect(),
    );
    assert!(q.max_abs_diff(&expect) < 1e-14);

    let a = 0.25;
    let y = g
        .boundary_trace(&crapper_w(a, 127).unwrap())
        .unwrap()
        .imag_part();
    let v3 = HolomorphicBoundaryFn::monomial(3, 8);
    let eta = g.boundary_trace(&v3).unwrap().imag_part();
    let bilinear = g.commutator_q_derivative(&y, &eta);
    assert!(bilinear.max_abs_diff(&closed_form_qw_at_crapper(&g, a, &v3).unwrap()) < 1e-10);
}

#[test]
fn linearization_matches_central_differences() {
    let g = SpectralGrid::new(256).unwrap();
    let w = crapper_w(0.3, 64).unwrap();
    let p = ParamSet::with_gravity(0.3, 0.02).unwrap();
    let lin = g.linearize(&w, &p).unwrap();
    let v = HolomorphicBoundaryFn::new(vec![0.2, -0.1, 0.05, 0.3, 0.0, 0.01]).resized(64);
    let eps = 1e-5;
    let fd = g
        .residual(&w.add_scaled(eps, &v), &p)
        .unwrap()
        .zip_with(&g.residual(&w.add_scaled(-eps, &v), &p).unwrap(), |a, b| {
            (a - b) / (2.0 * eps)
        });
    let an = lin.apply(&v).unwrap();
    assert!(an.max_abs_diff(&fd) / an.max_abs() < 1e-6);
    assert!(
        lin.apply(&HolomorphicBoundaryFn::zero(64))
            .unwrap()
            .max_abs()
            == 0.0
    );
}

#[test]
fn finite_depth_bound_on_modes() {
    // unnormalized L2 norm on the right-hand side
    let m = 128;
    let g = SpectralGrid::new(m).unwrap();
    for depth in [3.0, 5.0, 10.0] {
        for n in 1..=10 {
            let f = GridFn::from_fn(m, |a| (n as f64 * a).cos());
            let d = g
                .hilbert_finite_depth(&f, depth)
                .unwrap()
                .zip_with(&g.hilbert(&f), |a, b| a - b);
            let l2 = (std::f64::consts::PI).sqrt();
            assert!(
                d.max_abs() <= 2.0 * (-2.0 * depth).exp() * l2,
                "H = {depth}, n = {n}"
            );
        }
    }
    assert!(g.hilbert_finite_depth(&GridFn::zeros(m), 0.0).is_err());
}

fn l2(f: &GridFn) -> f64 {
    let h = 2.0 * std::f64::consts::PI / f.len() as f64;
    (f.values().iter().map(|v| v * v).sum::<f64>() * h).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hilbert_squared_is_minus_identity_on_mean_free(c in prop::collection::vec(-1.0f64..1.0, 1..20)) {
        let m = 64;
        let g = SpectralGrid::new(m).unwrap();
        let f = even_fn(m, &c);
        let mean = f.values().iter().sum::<f64>() / m as f64;
        let hh = g.hilbert(&g.hilbert(&f));
        prop_assert!(hh.max_abs_diff(&f.map(|v| -(v - mean))) < 1e-13);
    }

    #[test]
    fn commutator_routes_agree(c in prop::collection::vec(-0.3f64..0.3, 1..12), shift in -2.0f64..2.0) {
        let m = 128;
        let g = SpectralGrid::new(m).unwrap();
        let y = even_fn(m, &c);
        let q = g.commutator_q(&y);
        prop_assert!(q.max_abs_diff(&g.commutator_q_quadrature(&y)) < 1e-9);
        prop_assert!(q.is_even(1e-13));
        prop_assert!(q.max_abs_diff(&g.commutator_q(&y.map(|v| v + shift))) < 1e-12);
    }

    #[test]
    fn linearization_is_linear(
        c1 in prop::collection::vec(-1.0f64..1.0, 1..10),
        c2 in prop::collection::vec(-1.0f64..1.0, 1..10),
        s in -2.0f64..2.0,
        a in 0.05f64..0.45,
    ) {
        let g = SpectralGrid::new(256).unwrap();
        let p = ParamSet::with_gravity(a, 0.01).unwrap();
        let lin = g.linearize(&crapper_w(a, 100).unwrap(), &p).unwrap();
        let v1 = HolomorphicBoundaryFn::new(c1).resized(16);
        let v2 = HolomorphicBoundaryFn::new(c2).resized(16);
        let lhs = lin.apply(&v1.add_scaled(s, &v2)).unwrap();
        let rhs = lin.apply(&v1).unwrap().zip_with(&lin.apply(&v2).unwrap(), |x, y| x + s * y);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn even_projection_round_trips(c in prop::collection::vec(-1.0f64..1.0, 1..30)) {
        let g = SpectralGrid::new(64).unwrap();
        let f = g.synthesize_even(&c).unwrap();
        let back = g.project_even(&f, c.len() - 1).unwrap();
        for (x, y) in back.iter().zip(&c) {
            prop_assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn traces_have_the_reflection_symmetry(c in prop::collection::vec(-0.2f64..0.2, 1..20)) {
        let m = 64;
        let g = SpectralGrid::new(m).unwrap();
        let tr = g.boundary_trace(&HolomorphicBoundaryFn::new(c)).unwrap();
        for j in 1..m {
            prop_assert!((tr.value[j].im - tr.value[m - j].im).abs() < 1e-14);
            prop_assert!((tr.value[j].re + tr.value[m - j].re).abs() < 1e-14);
        }
    }

    #[test]
    fn finite_depth_converges(c in prop::collection::vec(-1.0f64..1.0, 2..16), which in 0usize..3) {
        let depth = [3.0, 5.0, 10.0][which];
        let m = 64;
        let g = SpectralGrid::new(m).unwrap();
        let f = even_fn(m, &c);
        let d = g.hilbert_finite_depth(&f, depth).unwrap().zip_with(&g.hilbert(&f), |a, b| a - b);
        prop_assert!(d.max_abs() <= 2.0 * (-2.0 * depth).exp() * l2(&f) + 1e-15);
    }
}
