use thiserror::Error;

use crate::solver::{ContinuationTrace, NewtonReport};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the admissible range {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("grid size {0} is not an even number >= 4")]
    InvalidGrid(usize),

    #[error(
        "{modes} modes cannot be resolved on a grid of {points} points (need at least {needed})"
    )]
    Aliasing {
        modes: usize,
        points: usize,
        needed: usize,
    },

    /// The iterate left the open set where `1 - i zeta w_zeta` has no zeros on the circle.
    #[error("stagnation: min |1 - i zeta w_zeta| = {margin:e} is below {threshold:e}")]
    Stagnation { margin: f64, threshold: f64 },

    #[error("Jacobian condition estimate {condition:e} exceeds {limit:e}")]
    SingularJacobian { condition: f64, limit: f64 },

    #[error("Newton iteration did not converge in {} iterations (residual {:e})", .report.iterations, .report.final_residual)]
    NotConverged { report: Box<NewtonReport> },

    #[error("continuation failed at step {step}: {source}")]
    Continuation {
        step: usize,
        #[source]
        source: Box<Error>,
        partial: Box<ContinuationTrace>,
    },

    #[error("invalid bracket: {0}")]
    Bracket(String),

    #[error("contour quadrature did not converge (last change {change:e} with {points} nodes)")]
    Quadrature { change: f64, points: usize },
}
