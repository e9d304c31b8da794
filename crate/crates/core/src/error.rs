use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("graph is not connected: reached {reached} of {total} nodes")]
    Disconnected { reached: usize, total: usize },

    #[error("hop count {0} does not fit in 16 bits")]
    HopOverflow(usize),

    #[error("distance cache: {0}")]
    Cache(String),

    #[error("eigensolver did not converge for pair {pair} after {iterations} iterations")]
    NoConvergence { pair: usize, iterations: usize },

    #[error("requested {requested} dimensions but only {available} positive eigenvalues")]
    NotEnoughPositive { requested: usize, available: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("training data contains a single class")]
    SingleClass,

    #[error("class with {count} members cannot fill {folds} folds")]
    ClassTooSmall { count: usize, folds: usize },

    #[error("unknown {kind}: {name}")]
    Unknown { kind: &'static str, name: String },

    #[error("candidate column {column}: {source}")]
    Candidate {
        column: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
