use thiserror::Error;

/// Errors raised by the entropy-bound computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input value (negative probability, sum off, NaN, ...).
    #[error("invalid input: {0}")]
    Input(String),
    /// Argument outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The two arguments coincide where a strictly positive distance is required.
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// The request exceeds a hard resource cap.
    #[error("resource limit: {0}")]
    Resource(String),
    /// An iterative solver failed to reach its tolerance.
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
