#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Spectral solver for periodic traveling gravity waves on infinitely deep
//! flows of constant vorticity, in conformal coordinates on the unit disk.
//!
//! The free surface is `z(alpha) = alpha + w(e^{-i alpha})` with
//! `w(zeta) = sum_n i c_n zeta^n` and real `c_n`. At zero gravity a closed-form
//! family solves the problem for every amplitude `A` in `[0, 1/2)`; the solver
//! continues it to small positive gravity.

pub mod error;
pub mod exact;
pub mod geometry;
pub mod linear;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use exact::{a_max, crapper_w, profile_z_exact, CriticalAmplitudes, ParamSet};
pub use geometry::{
    find_touching_a, is_overhanging, reconstruct_profile, self_intersections, Classification,
    IntersectionReport, ProfileCurve,
};
pub use solver::{
    continue_in_a, continue_in_g, newton_solve, ContinuationOptions, ContinuationTrace,
    NewtonOptions, NewtonReport,
};
pub use spectral::{GridFn, HolomorphicBoundaryFn, SpectralGrid};
