use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("row operation needs two distinct rows, got {0} twice")]
    SameRow(usize),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("graph has no active vertices")]
    EmptyGraph,
    #[error("vertices {0} and {1} are not connected")]
    Disconnected(usize, usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid wire map: {0}")]
    InvalidWireMap(String),
    #[error("invalid grid layout: {0}")]
    Layout(String),
    #[error("invalid region: {0}")]
    Region(String),
    #[error("oracle supports n <= 4, got {0}")]
    OracleTooLarge(usize),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("verification failed for seed {seed}: {msg}")]
    Verification { seed: u64, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
