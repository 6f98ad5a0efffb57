use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("jacobi iteration did not converge after {sweeps} sweeps (off-diagonal residual {residual})")]
    NoConvergence { sweeps: usize, residual: String },

    #[error("objective is not unimodal on [{lo}, {hi}]: grid minimum near {grid}, golden-section minimum at {golden}")]
    NonUnimodal {
        lo: f64,
        hi: f64,
        grid: f64,
        golden: f64,
    },

    #[error(
        "trace denominator is not positive ({0}); special-function evaluation is inconsistent"
    )]
    NonPositiveTrace(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
