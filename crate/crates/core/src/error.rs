use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("ill-conditioned input: {0}")]
    Conditioning(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension {k} not supported by {operation}")]
    Dimension { k: usize, operation: &'static str },

    #[error("point is not a vertex of the polytope")]
    NotAVertex,

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("not a unit decomposition: residual {residual:e} exceeds {tol:e}")]
    NotIsotropic { residual: f64, tol: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Format(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Format(err.to_string())
    }
}
