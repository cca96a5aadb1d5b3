use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("structural error: {0}")]
    Structure(String),

    #[error("degenerate metric at parameter ({u}, {v}): det = {det:e}")]
    DegenerateMetric { u: f64, v: f64, det: f64 },

    #[error("inadmissible field: {0}")]
    Inadmissible(String),

    #[error("factorization breakdown at pivot {index} (|d| = {value:e})")]
    Breakdown { index: usize, value: f64 },

    #[error("eigensolver did not converge: best residual {residual:e}")]
    NoConvergence { residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn structure(msg: impl Into<String>) -> Error {
    Error::Structure(msg.into())
}
