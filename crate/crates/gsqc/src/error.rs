use thiserror::Error;

/// Errors across circuit construction, assembly, solving and parsing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid circuit: {0}")]
    Circuit(String),

    #[error("circuit validation failed: {0:?}")]
    Validation(Vec<String>),

    #[error("dimension {dim} exceeds the configured maximum {max}")]
    DimensionGuard { dim: u128, max: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("readout soundness violation: {0}")]
    Soundness(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
