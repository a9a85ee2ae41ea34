use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Two objects that must share a support, grid or size do not.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// Inputs that make an aggregate undefined (all-zero weights, empty sets).
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("unknown point `{0}`")]
    Lookup(String),
    /// A test matrix, prior or basis failed structural validation.
    #[error("validation failed: {0}")]
    Validation(String),
    /// The tuning pair does not satisfy the sign pattern the theorem needs.
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("bracket error: {0}")]
    Bracket(String),
    /// Observations that the model cannot evaluate (outside support or window).
    #[error("data error: {0}")]
    Data(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("numeric overflow: {0}")]
    Overflow(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
