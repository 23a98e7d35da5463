use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph invariant violated: {0}")]
    Graph(String),

    #[error("party assignment invalid: {0}")]
    Assignment(String),

    #[error("unknown party `{0}`")]
    UnknownParty(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("cell {cell} (p0={p0}, h={h}), repetition {rep}: {source}")]
    Cell {
        cell: usize,
        rep: usize,
        p0: f64,
        h: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
