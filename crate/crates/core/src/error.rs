use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero vector used as a direction")]
    InvalidDirection,
    #[error("invalid rational {0:?}")]
    BadRational(String),
    #[error("invalid weight sequence {0:?}")]
    BadSequence(String),
    #[error("multinomial parts exceed total or are negative")]
    InvalidMultinomial,
    #[error("invalid class parameters: {0}")]
    InvalidClass(String),
    #[error("bounded edge with zero direction")]
    ContractedBoundedEdge,
    #[error("component of the cut curve has no free end")]
    NoFreeEnd,
    #[error("component of the cut curve has more than one free end")]
    AmbiguousOrientation,
    #[error("vertex not of an admissible type")]
    NotMultiplicative,
    #[error("malformed combinatorial type: {0}")]
    MalformedType(String),
    #[error("linear system is not square ({rows} equations, {cols} unknowns)")]
    NotSquare { rows: usize, cols: usize },
    #[error("singular linear system")]
    Singular,
    #[error("invalid invariant key: {0}")]
    InvalidKey(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("conditions not in general position ({0})")]
    GenericityFault(String),
    #[error("no generic conditions found after {0} attempts")]
    GenericityExhausted(usize),
    #[error("{path}: {msg}")]
    Problem { path: String, msg: String },
    #[error("io: {0}")]
    Io(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
