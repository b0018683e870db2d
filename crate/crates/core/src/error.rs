use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::eigen::Eigenvalue;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },
    #[error("spectrum touches the closed negative real axis: {spectrum:?}")]
    BranchCutViolation { spectrum: Vec<Eigenvalue> },
    #[error("rotation angle {angle} is within the guard band of pi")]
    NearBranchCut { angle: f64 },
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("elements belong to different group families")]
    FamilyMismatch,
    #[error("invalid observer gains: {0}")]
    GainsInvalid(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid scenario: {0}")]
    ScenarioInvalid(String),
    #[error("integration step failed at t = {time}: {source}")]
    StepFailure { time: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::DomainViolation(msg.into())
    }

    pub(crate) fn step_failure(time: f64, source: Error) -> Self {
        match source {
            // keep the earliest failure time when errors are rewrapped
            e @ Error::StepFailure { .. } => e,
            other => Error::StepFailure {
                time,
                source: Box::new(other),
            },
        }
    }
}
