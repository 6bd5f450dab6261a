//! Radial ground states of `-Δu + μu = g(u)` in `R^N`, their mass-frequency
//! curves, and normalized solutions with prescribed `1/2 |u|_2^2 = m`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod curve;
pub mod error;
pub mod io;
pub mod nonlinearity;
pub mod profile;
pub mod roots;
pub mod scaling;
pub mod shooting;
pub mod verify;

pub use curve::{
    c_star, find_normalized, scan, CurveSample, FrequencyCurve, NormalizedSolution, ScanOptions,
};
pub use error::{Error, Result};
pub use nonlinearity::NonlinearitySpec;
pub use profile::{FunctionalReport, RadialProfile};
pub use shooting::{ground_state, multi_start_ground_states, GroundState, SolverOptions};
