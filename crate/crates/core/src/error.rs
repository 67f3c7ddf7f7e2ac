use thiserror::Error;

use crate::stepsize::Violation;

/// Failure reported by a user-supplied oracle (gradient, prox or argmin map).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("stepsize must be positive, got {0}")]
    NonPositiveStepsize(f64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("schedule violation at iteration {iteration}: {}", format_violations(.violations))]
    ScheduleViolation { iteration: usize, violations: Vec<Violation> },
    #[error("backtracking collapse at iteration {iteration}: stepsize fell below 1e-300")]
    BacktrackingCollapse { iteration: usize },
    #[error("oracle failure at iteration {iteration}: {source}")]
    Oracle { iteration: usize, source: OracleError },
    #[error("non-finite iterate at iteration {iteration}")]
    NonFiniteIterate { iteration: usize },
    #[error("{0}")]
    OracleFailure(#[from] OracleError),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("missing value: {0}")]
    Missing(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

impl Error {
    pub(crate) fn at(iteration: usize) -> impl FnOnce(OracleError) -> Error {
        move |source| Error::Oracle { iteration, source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
