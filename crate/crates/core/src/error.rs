use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("community {0} is empty")]
    EmptyCommunity(usize),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("non-finite message value at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("compensation exponents sum to {total}, but only {available} columns are available")]
    ExponentOverflow { total: usize, available: usize },

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("typical set is empty")]
    EmptyTypicalSet,

    #[error("path basis does not belong to this graph")]
    BasisMismatch,

    #[error("no basis paths of length {0} in graph")]
    EmptyBasis(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
