use thiserror::Error;

/// Errors raised by TRAP operations on any backend.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrapError {
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("grid mismatch")]
    GridMismatch,

    #[error("backend has no unit in P(1,1); graph with io edges or loops cannot be evaluated")]
    NotUnitary,

    #[error("decoration is not invariant under the symmetric actions: {0}")]
    NotInvariant(String),

    #[error("invalid data: {0}")]
    InvalidData(String),
}

pub type Result<T> = std::result::Result<T, TrapError>;

pub(crate) fn check_index(index: usize, bound: usize) -> Result<()> {
    if index == 0 || index > bound {
        Err(TrapError::IndexOutOfRange { index, bound })
    } else {
        Ok(())
    }
}
