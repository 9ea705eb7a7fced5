use thiserror::Error;

/// Errors raised by the game model, the solvers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("LP solver failed: {0}")]
    Lp(String),

    #[error("pivot limit of {limit} exceeded after {pivots} pivots")]
    PivotLimit { limit: usize, pivots: usize },

    #[error("cycling detected in Lemke-Howson path at pivot {0}")]
    Cycling(usize),

    #[error("solver produced an invalid equilibrium: {0}")]
    InvalidEquilibrium(String),

    #[error("deadline exceeded")]
    Timeout,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
