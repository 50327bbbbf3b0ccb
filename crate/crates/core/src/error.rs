use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the `fjopt-core` library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid opinions: {0}")]
    InvalidOpinions(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("k = {k} is out of range for n = {n} (need 1 <= k <= n)")]
    KOutOfRange { k: usize, n: usize },

    #[error(
        "n = {n} exceeds the dense size cap of {cap}; use the sampling estimator instead"
    )]
    SizeCapExceeded { n: usize, cap: usize },

    #[error("iteration did not converge after {iterations} iterations (last change {last_change:e})")]
    NotConverged {
        iterations: usize,
        last_change: f64,
        last: Vec<f64>,
    },

    #[error("singular system (I + L) encountered during factorization")]
    Singular,

    #[error("combinatorial budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("random walk exceeded {limit} steps while sampling a forest")]
    StepLimit { limit: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
