use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("index {index:?} is not a point of the lattice (axis bound {bound})")]
    OffLattice { index: Vec<i64>, bound: i64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("duplicate lattice index {0:?}")]
    DuplicateIndex(Vec<i64>),

    #[error("{symbol}: gradient undefined at {point:?}")]
    SingularPoint { symbol: String, point: Vec<f64> },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge after {panels} panels (last change {last_change:e}, value {value})")]
    Quadrature {
        panels: usize,
        last_change: f64,
        value: f64,
    },

    #[error("malformed record: {0}")]
    Record(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
