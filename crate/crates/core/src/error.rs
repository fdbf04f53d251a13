use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("duplicate entry for ordered pair ({0}, {1})")]
    DuplicatePair(usize, usize),

    #[error("invalid sign {0}, expected -1 or 1")]
    InvalidSign(i64),

    #[error("invalid appraisal entry {value} at ({row}, {col}), expected -1, 0 or 1")]
    InvalidEntry { row: usize, col: usize, value: i64 },

    #[error("nonzero diagonal entry at node {0}")]
    NonzeroDiagonal(usize),

    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },

    #[error("graph must have at least one node")]
    EmptyGraph,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{what}: size {size} exceeds the limit of {limit} (use force to override)")]
    GuardExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("appraisal matrix is not bilateral")]
    NotBilateral,

    #[error("appraisal matrix is not sign-symmetric on its links")]
    NotSignSymmetric,

    #[error("cycle traverses a missing link ({0}, {1})")]
    MissingLink(usize, usize),

    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    #[error("invalid chord {{{0}, {1}}}: {2}")]
    InvalidChord(usize, usize, &'static str),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("no candidate pair: every appraisal is zero")]
    NoCandidatePair,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("length mismatch: {0} x-values vs {1} y-values")]
    LengthMismatch(usize, usize),

    #[error("at least two points are required, got {0}")]
    TooFewPoints(usize),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
