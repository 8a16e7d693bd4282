//! Stationary coupled NLS–KdV systems: discretization, energy calculus,
//! Nehari-constrained ground states, thresholds, and bound states.

pub mod closedform;
pub mod error;
pub mod grid;
mod linalg;
pub mod model;
pub mod nehari;
pub mod persist;
pub mod solver;
pub mod spectra;

pub use error::{Error, Result};
pub use grid::{Field, Grid};
pub use model::{Functional, NParams, Params, State};
pub use solver::{Flags, SolveReport, SolverCfg};
pub use spectra::Classification;
