use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Argument outside the domain of a function (e.g. a Bessel Y at zero).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("format error in {path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("mesh validation failed: {0}")]
    Validation(String),

    #[error("element {element} has non-positive Jacobian determinant {det:e}")]
    InvalidElement { element: usize, det: f64 },

    #[error("factorization breakdown at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("solver residual {achieved:e} exceeds tolerance {tol:e}")]
    Convergence { achieved: f64, tol: f64 },

    #[error("computation failed: {0}")]
    Computation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
