use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad user input: problem files, colorings, parameters.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("resource limit exceeded: {what} would need about {estimate} entries (cap {cap})")]
    ResourceLimit {
        what: String,
        estimate: u64,
        cap: u64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("flag type mismatch: {0}")]
    TypeMismatch(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("block {block} is not positive semidefinite")]
    NotPsd { block: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("inadmissible witness: {0}")]
    Inadmissible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
