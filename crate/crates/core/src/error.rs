use thiserror::Error;

/// Errors raised by the library.
///
/// Divergences never fail on support mismatch; they return `f64::INFINITY`
/// instead. Errors are reserved for malformed inputs, infeasible
/// constraints and solver breakdowns.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid simplex vector: {0}")]
    InvalidSimplex(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible constraint: target mean {target} is outside the open hull ({lo}, {hi})")]
    Infeasible { target: f64, lo: f64, hi: f64 },

    #[error("solver did not converge: {method} after {iterations} iterations (residual {residual:e})")]
    Convergence { method: &'static str, iterations: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate estimate: {0}")]
    Degenerate(String),

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
