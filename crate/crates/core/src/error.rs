use thiserror::Error;

use crate::solver::TracePoint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error(
        "invalid wave parameters: omega={omega}, c={c} gives lambda1={lambda1}, lambda2={lambda2}"
    )]
    InvalidWaveParameters {
        omega: f64,
        c: f64,
        lambda1: f64,
        lambda2: f64,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("unsupported sech moment k={0} (supported: 4, 6, 8)")]
    UnsupportedMoment(u32),

    #[error("explicit family undefined for beta={0} (requires 0 < beta < 1/6)")]
    FamilyUndefined(f64),

    #[error("Nehari projection failed: {0}")]
    ProjectionFailure(String),

    #[error("state is not on the Nehari set: relative defect {defect:e} exceeds {tol:e}")]
    NotOnManifold { defect: f64, tol: f64 },

    #[error(
        "rearrangement needs nonnegative data: component {component} has {value:e} at node {index}"
    )]
    RearrangementDomain {
        component: usize,
        index: usize,
        value: f64,
    },

    #[error("eigensolver failed after {iterations} iterations (last Rayleigh change {change:e})")]
    EigensolverFailure { iterations: usize, change: f64 },

    #[error("no positive root: {0}")]
    NoPositiveRoot(String),

    #[error("no seed converged (best constrained gradient {best_grad_norm:e} after {iterations} iterations)")]
    NonConvergence {
        best_grad_norm: f64,
        iterations: usize,
        trace: Vec<TracePoint>,
    },

    #[error("converged state at energy {converged} is not minimal: an unconverged descent reached {reached}")]
    NotMinimal {
        converged: f64,
        reached: f64,
        trace: Vec<TracePoint>,
    },

    #[error("continuation failed at eps={failed_eps} (last good eps={last_good_eps:?}): {reason}")]
    ContinuationFailure {
        failed_eps: f64,
        last_good_eps: Option<f64>,
        reason: String,
    },

    #[error("mountain pass not found: {0}")]
    PassNotFound(String),

    #[error("linear solve failed: {0}")]
    Singular(String),

    #[error("persistence error: {0}")]
    Persist(String),
}

impl Error {
    /// Validation-class errors are the caller's fault; everything else is a
    /// numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidGrid(_)
                | Error::InvalidWaveParameters { .. }
                | Error::InvalidParams(_)
                | Error::Shape { .. }
                | Error::UnsupportedMoment(_)
                | Error::FamilyUndefined(_)
                | Error::Persist(_)
        )
    }
}
