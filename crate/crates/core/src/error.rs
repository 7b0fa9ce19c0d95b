use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("graph of groups is not reduced")]
    NotReduced,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge sequence is not a closed cycle: {0}")]
    NotACycle(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("invalid graph of groups: {0}")]
    InvalidGog(String),
    #[error("invalid H-graph: {0}")]
    InvalidHGraph(String),
    #[error("multiplicity bound already reached: {0}")]
    SaturationBound(String),
    #[error("transfer equation fails: {0}")]
    TransferViolation(String),
    #[error("unsupported graph shape: {0}")]
    UnsupportedShape(String),
    #[error("inputs live over different graphs of groups")]
    MixedGog,
    #[error("bad lattice rank: {0}")]
    BadRank(String),
    #[error("invalid subgroup representation: {0}")]
    InvalidRep(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
