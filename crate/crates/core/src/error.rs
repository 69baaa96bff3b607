use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An operation was called outside its domain (object mismatch, bad subset, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Input data violates an invariant (non-stochastic table, non-CP map, ...).
    #[error("validation error: {0}")]
    Validation(String),
    /// The backend lacks the structure the operation needs.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
