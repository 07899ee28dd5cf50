use thiserror::Error;

/// Every fallible operation in the crate reports through this type.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no Bezout certificate: {0}")]
    NoCertificate(String),

    #[error("numeric failure: {msg} (best radius {best_radius:e})")]
    NumericFailure { msg: String, best_radius: f64 },

    #[error("resource limit exceeded: {what}")]
    ResourceLimit { what: String, partial: Option<f64> },

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("degree stagnation: no iterate up to {cap} has degree above {threshold}")]
    DegreeStagnation { cap: usize, threshold: String },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::InvariantViolation(msg.into())
    }
}
