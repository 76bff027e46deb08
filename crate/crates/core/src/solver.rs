//! Newton iteration on the truncated Bernoulli residual and continuation of
//! solution branches in gravity or amplitude.
//!
//! Unknowns are the real coefficients `c_0..c_N` of `w = sum i c_n zeta^n`;
//! equations are the cosine modes `0..N` of the residual. The system is square
//! and no normalization is added.

use nalgebra::DVector;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{check_amplitude, crapper_w, ParamSet};
use crate::spectral::{HolomorphicBoundaryFn, SpectralGrid};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    /// Max-norm of the grid residual accepted as converged.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Step halvings tried when a full step increases the residual.
    pub max_halvings: usize,
    pub condition_limit: f64,
    /// Grid size; `4 N` when absent.
    pub points: Option<usize>,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-11,
            max_iterations: 25,
            max_halvings: 5,
            condition_limit: 1e12,
            points: None,
        }
    }
}

impl NewtonOptions {
    pub fn grid_points(&self, modes: usize) -> usize {
        self.points.unwrap_or((4 * modes).max(16))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Residual max-norm before each step and after the last one.
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
    pub stagnation_margin: f64,
    pub converged: bool,
    /// Largest Jacobian condition estimate met along the way.
    pub condition_estimate: f64,
}

/// Solves `F(w; G, A) = 0` from `w0` with the grid taken from `opts`.
pub fn newton_solve(
    w0: &HolomorphicBoundaryFn,
    params: &ParamSet,
    opts: &NewtonOptions,
) -> Result<(HolomorphicBoundaryFn, NewtonReport)> {
    let grid = SpectralGrid::new(opts.grid_points(w0.order()))?;
    newton_solve_on(&grid, w0, params, opts)
}

pub fn newton_solve_on(
    grid: &SpectralGrid,
    w0: &HolomorphicBoundaryFn,
    params: &ParamSet,
    opts: &NewtonOptions,
) -> Result<(HolomorphicBoundaryFn, NewtonReport)> {
    let n = w0.order();
    let mut w = w0.clone();
    let mut lin = grid.linearize(&w, params)?;
    let mut r = lin.residual().max_abs();
    let mut report = NewtonReport {
        iterations: 0,
        residual_history: vec![r],
        final_residual: r,
        stagnation_margin: lin.stagnation_margin(),
        converged: false,
        condition_estimate: 0.0,
    };
    loop {
        if r <= opts.tolerance {
            report.converged = true;
            return Ok((w, report));
        }
        if !r.is_finite() || report.iterations >= opts.max_iterations {
            return Err(Error::NotConverged {
                report: Box::new(report),
            });
        }

        let svd = lin.jacobian()?.svd(true, true);
        let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
        let condition = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        report.condition_estimate = report.condition_estimate.max(condition);
        if !(condition <= opts.condition_limit) {
            return Err(Error::SingularJacobian {
                condition,
                limit: opts.condition_limit,
            });
        }
        let rhs = DVector::from_vec(grid.project_even(lin.residual(), n)?);
        let delta = svd.solve(&rhs, 0.0).map_err(|_| Error::SingularJacobian {
            condition,
            limit: opts.condition_limit,
        })?;
        let delta = HolomorphicBoundaryFn::new(delta.iter().copied().collect());

        let mut scale = 1.0;
        let mut accepted = None;
        let mut last_err = None;
        for halving in 0..=opts.max_halvings {
            let trial = w.add_scaled(-scale, &delta);
            match grid.linearize(&trial, params) {
                Ok(next) => {
                    let rn = next.residual().max_abs();
                    if rn < r || halving == opts.max_halvings {
                        accepted = Some((trial, next, rn));
                        break;
                    }
                }
                Err(e @ Error::Stagnation { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
            scale *= 0.5;
        }
        let Some((trial, next, rn)) = accepted else {
            return Err(last_err.expect("every halving left the admissible set"));
        };
        w = trial;
        lin = next;
        r = rn;
        report.iterations += 1;
        report.residual_history.push(r);
        report.final_residual = r;
        report.stagnation_margin = lin.stagnation_margin();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContinuationParameter {
    Gravity,
    Amplitude,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationStep {
    pub params: ParamSet,
    pub w: HolomorphicBoundaryFn,
    pub report: NewtonReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationTrace {
    pub direction: ContinuationParameter,
    pub steps: Vec<ContinuationStep>,
}

impl ContinuationTrace {
    pub fn last(&self) -> Option<&ContinuationStep> {
        self.steps.last()
    }

    pub fn all_converged(&self) -> bool {
        self.steps.iter().all(|s| s.report.converged)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    /// Truncation order `N` of the unknown series.
    pub modes: usize,
    pub newton: NewtonOptions,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            modes: 128,
            newton: NewtonOptions::default(),
        }
    }
}

fn run_continuation(
    direction: ContinuationParameter,
    params: impl Iterator<Item = Result<ParamSet>>,
    w0: HolomorphicBoundaryFn,
    opts: &ContinuationOptions,
) -> Result<ContinuationTrace> {
    let grid = SpectralGrid::new(opts.newton.grid_points(opts.modes))?;
    let mut trace = ContinuationTrace {
        direction,
        steps: Vec::new(),
    };
    let mut w = w0;
    for (step, p) in params.enumerate() {
        let solved = p.and_then(|p| newton_solve_on(&grid, &w, &p, &opts.newton).map(|s| (p, s)));
        match solved {
            Ok((p, (sol, report))) => {
                w = sol.clone();
                trace.steps.push(ContinuationStep {
                    params: p,
                    w: sol,
                    report,
                });
            }
            Err(e) => {
                return Err(Error::Continuation {
                    step,
                    source: Box::new(e),
                    partial: Box::new(trace),
                })
            }
        }
    }
    Ok(trace)
}

/// Follows the branch from the exact solution at `G = 0` to `g_target` in
/// `n_steps` equal increments. Step 0 is the exact solution itself.
pub fn continue_in_g(
    amplitude: f64,
    g_target: f64,
    n_steps: usize,
    opts: &ContinuationOptions,
) -> Result<ContinuationTrace> {
    if !(amplitude > 0.0 && amplitude < 0.5) {
        return Err(Error::Domain {
            name: "A",
            value: amplitude,
            range: "(0, 1/2)",
        });
    }
    if !g_target.is_finite() {
        return Err(Error::Domain {
            name: "G",
            value: g_target,
            range: "finite",
        });
    }
    let steps = if g_target == 0.0 { 0 } else { n_steps.max(1) };
    let w0 = crapper_w(amplitude, opts.modes)?;
    let params = (0..=steps).map(move |k| {
        let g = if steps == 0 {
            0.0
        } else {
            g_target * k as f64 / steps as f64
        };
        ParamSet::with_gravity(amplitude, g)
    });
    run_continuation(ContinuationParameter::Gravity, params, w0, opts)
}

/// Follows the branch at fixed gravity from `a_from` to `a_to`, with `Omega`
/// and `B` reset from the amplitude at every step.
pub fn continue_in_a(
    gravity: f64,
    a_from: f64,
    a_to: f64,
    n_steps: usize,
    opts: &ContinuationOptions,
) -> Result<ContinuationTrace> {
    for a in [a_from, a_to] {
        if !(a > 0.0 && a < 0.5) {
            return Err(Error::Domain {
                name: "A",
                value: a,
                range: "(0, 1/2)",
            });
        }
    }
    let steps = n_steps.max(1);
    let w0 = crapper_w(a_from, opts.modes)?;
    let params = (0..=steps).map(move |k| {
        let a = a_from + (a_to - a_from) * k as f64 / steps as f64;
        ParamSet::with_gravity(a, gravity)
    });
    run_continuation(ContinuationParameter::Amplitude, params, w0, opts)
}

/// Largest relative discrepancy between analytic Jacobian columns and
/// central differences over `n_probes` random basis directions `i zeta^n`.
///
/// The step is `1e-5 / (1 + n)` so that the perturbation of `zeta w_zeta`
/// stays the same size for every mode.
pub fn jacobian_fd_check(
    w: &HolomorphicBoundaryFn,
    params: &ParamSet,
    n_probes: usize,
    seed: u64,
) -> Result<f64> {
    check_amplitude(params.amplitude)?;
    let n = w.order();
    let grid = SpectralGrid::new((4 * n).max(16))?;
    let lin = grid.linearize(w, params)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_probes {
        let mode = rng.random_range(0..=n);
        let h = 1e-5 / (1.0 + mode as f64);
        let dir = HolomorphicBoundaryFn::monomial(mode, n);
        let plus = grid.residual(&w.add_scaled(h, &dir), params)?;
        let minus = grid.residual(&w.add_scaled(-h, &dir), params)?;
        let fd = plus.zip_with(&minus, |a, b| (a - b) / (2.0 * h));
        let analytic = lin.apply_mode(mode);
        let scale = analytic.max_abs().max(fd.max_abs()).max(f64::MIN_POSITIVE);
        worst = worst.max(analytic.max_abs_diff(&fd) / scale);
    }
    Ok(worst)
}
