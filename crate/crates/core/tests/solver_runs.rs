use overhang_core::error::Error;
use overhang_core::exact::{crapper_w, ParamSet};
use overhang_core::geometry::{is_overhanging, reconstruct_profile, self_intersections};
use overhang_core::solver::*;
use overhang_core::spectral::SpectralGrid;
use proptest::prelude::*;

fn opts(modes: usize) -> ContinuationOptions {
    ContinuationOptions {
        modes,
        ..Default::default()
    }
}

#[test]
fn fixed_point_at_zero_gravity() {
    let w0 = crapper_w(0.44, 128).unwrap();
    let p = ParamSet::zero_gravity(0.44).unwrap();
    let (w, rep) = newton_solve(&w0, &p, &NewtonOptions::default()).unwrap();
    assert!(rep.iterations <= 1 && rep.converged);
    assert!(rep.final_residual < 1e-11);
    assert!(w.max_abs_diff(&w0) < 1e-11);
}

#[test]
fn quadratic_convergence_at_small_gravity() {
    let w0 = crapper_w(0.44, 128).unwrap();
    let p = ParamSet::with_gravity(0.44, 0.01).unwrap();
    let (_, rep) = newton_solve(&w0, &p, &NewtonOptions::default()).unwrap();
    assert!(rep.converged && rep.iterations <= 8);
    // slopes of log r_{k+1} against log r_k while above the rounding floor
    let h: Vec<f64> = rep
        .residual_history
        .iter()
        .copied()
        .filter(|&r| r > 1e-9)
        .collect();
    assert!(h.len() >= 3, "{h:?}");
    let n = h.len();
    let slope = (h[n - 1] / h[n - 2]).ln() / (h[n - 2] / h[n - 3]).ln();
    assert!(
        slope >= 1.8,
        "slope {slope}, history {:?}",
        rep.residual_history
    );
}

#[test]
fn large_gravity_fails_with_a_typed_error() {
    let w0 = crapper_w(0.3, 128).unwrap();
    let p = ParamSet::with_gravity(0.3, 10.0).unwrap();
    match newton_solve(&w0, &p, &NewtonOptions::default()) {
        Err(
            Error::SingularJacobian { .. } | Error::Stagnation { .. } | Error::NotConverged { .. },
        ) => {}
        other => panic!("unexpected outcome {other:?}"),
    }
}

#[test]
fn residual_stays_even() {
    let g = SpectralGrid::new(512).unwrap();
    let t = continue_in_g(0.44, 0.02, 4, &opts(128)).unwrap();
    for s in &t.steps {
        let r = g.residual(&s.w, &s.params).unwrap();
        let sine = g.project_odd(&r, 128).unwrap();
        assert!(
            sine.iter().all(|b| b.abs() < 1e-13),
            "{:e}",
            sine.iter().fold(0.0f64, |m, b| m.max(b.abs()))
        );
    }
}

#[test]
fn overhanging_branch_in_gravity() {
    let t = continue_in_g(0.44, 0.05, 10, &opts(128)).unwrap();
    assert_eq!(t.steps.len(), 11);
    assert!(t.all_converged());
    for pair in t.steps.windows(2) {
        assert_eq!(pair[0].params.amplitude, pair[1].params.amplitude);
        assert_eq!(pair[0].params.omega, pair[1].params.omega);
        assert!(pair[1].params.gravity > pair[0].params.gravity);
    }
    let p = reconstruct_profile(&t.last().unwrap().w, 512).unwrap();
    assert!(is_overhanging(&p).overhanging);
}

#[test]
fn graph_profile_persists_at_small_amplitude() {
    let t = continue_in_g(0.2, 0.05, 10, &opts(64)).unwrap();
    let p = reconstruct_profile(&t.last().unwrap().w, 256).unwrap();
    assert!(!is_overhanging(&p).overhanging);
    assert_eq!(self_intersections(&p).unwrap().count, 0);
}

#[test]
fn amplitude_continuation_at_zero_gravity_stays_on_the_family() {
    let t = continue_in_a(0.0, 0.1, 0.45, 7, &opts(128)).unwrap();
    for s in &t.steps {
        let exact = crapper_w(s.params.amplitude, 128).unwrap();
        assert!(s.w.max_abs_diff(&exact) < 1e-11);
    }
}

#[test]
fn amplitude_continuation_crosses_the_touching_amplitude() {
    let t = continue_in_a(0.01, 0.40, 0.47, 14, &opts(128)).unwrap();
    assert!(t.all_converged());
    let first = reconstruct_profile(&t.steps[0].w, 512).unwrap();
    let last = reconstruct_profile(&t.last().unwrap().w, 512).unwrap();
    assert_eq!(self_intersections(&first).unwrap().count, 0);
    assert_eq!(self_intersections(&last).unwrap().count, 2);
    for s in &t.steps {
        let p = ParamSet::with_gravity(s.params.amplitude, 0.01).unwrap();
        assert_eq!(s.params, p);
    }
}

#[test]
fn branch_is_locally_unique() {
    let t = continue_in_a(0.01, 0.40, 0.455, 11, &opts(128)).unwrap();
    let via_branch = &t.last().unwrap().w;
    let p = ParamSet::with_gravity(0.455, 0.01).unwrap();
    let (fresh, _) = newton_solve(
        &crapper_w(0.455, 128).unwrap(),
        &p,
        &NewtonOptions::default(),
    )
    .unwrap();
    assert!(via_branch.max_abs_diff(&fresh) < 1e-9);
}

#[test]
fn truncation_doubling_leaves_profile_unchanged() {
    let coarse = continue_in_g(0.44, 0.02, 10, &opts(128)).unwrap();
    let fine = continue_in_g(0.44, 0.02, 10, &opts(256)).unwrap();
    let a = reconstruct_profile(&coarse.last().unwrap().w, 1024).unwrap();
    let b = reconstruct_profile(&fine.last().unwrap().w, 1024).unwrap();
    let d = (0..1024)
        .map(|j| (a.x[j] - b.x[j]).abs().max((a.y[j] - b.y[j]).abs()))
        .fold(0.0, f64::max);
    assert!(d < 1e-8, "{d:e}");
}

#[test]
fn failed_step_keeps_partial_trace() {
    let strict = ContinuationOptions {
        modes: 64,
        newton: NewtonOptions {
            max_iterations: 1,
            ..Default::default()
        },
    };
    match continue_in_g(0.44, 0.05, 2, &strict) {
        Err(Error::Continuation { step, partial, .. }) => {
            assert_eq!(step, 1);
            assert_eq!(partial.steps.len(), 1);
        }
        other => panic!("unexpected outcome {other:?}"),
    }
}

#[test]
fn analytic_jacobian_matches_differences() {
    let w = crapper_w(0.3, 64).unwrap();
    assert!(jacobian_fd_check(&w, &ParamSet::zero_gravity(0.3).unwrap(), 10, 7).unwrap() < 1e-6);
    let mut c = w.coeffs().to_vec();
    c[2] += 0.01;
    c[5] -= 0.003;
    let wp = overhang_core::HolomorphicBoundaryFn::new(c);
    assert!(
        jacobian_fd_check(&wp, &ParamSet::with_gravity(0.3, 0.02).unwrap(), 10, 11).unwrap() < 1e-5
    );
}

#[test]
fn report_round_trips_through_json() {
    let t = continue_in_g(0.3, 0.01, 1, &opts(32)).unwrap();
    let s = serde_json::to_string(&t).unwrap();
    let back: ContinuationTrace = serde_json::from_str(&s).unwrap();
    assert_eq!(back.steps.len(), 2);
    assert_eq!(back.direction, ContinuationParameter::Gravity);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn newton_iterates_are_quadratically_convergent(a in 0.1f64..0.45, g in 0.002f64..0.02) {
        let w0 = crapper_w(a, 96).unwrap();
        let p = ParamSet::with_gravity(a, g).unwrap();
        let (_, rep) = newton_solve(&w0, &p, &NewtonOptions::default()).unwrap();
        prop_assert!(rep.converged && rep.iterations <= 8);
        let h = &rep.residual_history;
        for k in 1..h.len() {
            if h[k - 1] < 1e-3 && h[k] > 1e-9 {
                prop_assert!(h[k] <= 50.0 * h[k - 1] * h[k - 1], "{:?}", h);
            }
        }
    }
}
