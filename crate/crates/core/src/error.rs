use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A matrix that must be nonsingular (or positive-definite) is not.
    #[error("rank error: {0}")]
    Rank(String),

    /// The operation is not available for the given model or class.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An input violated a structural contract (e.g. a non-Hermitian matrix
    /// handed to the Hermitian eigensolver).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A quadrature or iteration did not reach its accuracy target.
    #[error("accuracy error: {what} (estimate {estimate:.3e}, target {target:.3e})")]
    Accuracy {
        what: String,
        estimate: f64,
        target: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
