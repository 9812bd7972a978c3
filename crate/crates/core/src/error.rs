use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The input is well-formed but the operation is not defined on it
    /// (e.g. betweenness of a disconnected graph).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric failure after {iterations} iterations: {message}")]
    Numeric { message: String, iterations: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A file parsed correctly but violates a data invariant.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("training diverged at epoch {epoch}: loss {loss}")]
    Training { epoch: usize, loss: f64 },

    #[error("optimizer error: {0}")]
    Optimizer(String),

    #[error("strategy {strategy} failed: {message}")]
    Strategy { strategy: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
