//! Error type shared by all estimation and learning routines.

use thiserror::Error;

/// Errors raised by estimators, learners and samplers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,
    #[error("non-finite value in sample at index {index}: {value}")]
    NonFinite { index: usize, value: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("root finder did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("bracketing failed: {0}")]
    Bracket(String),
    #[error("unsupported distribution family: {0}")]
    UnsupportedFamily(String),
}

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
