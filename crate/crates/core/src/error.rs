use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input contains a non-finite value at position {position}")]
    NonFiniteInput { position: usize },

    #[error("pattern order {order} is too small (minimum 2)")]
    OrderTooSmall { order: usize },

    #[error("pattern order {order} is too large (maximum {max})")]
    OrderTooLarge { order: usize, max: usize },

    #[error("pattern index {index} out of range for order {order} ({count} patterns)")]
    IndexOutOfRange { index: usize, order: usize, count: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("patterns of different orders mixed ({expected} and {actual})")]
    OrderMismatch { expected: usize, actual: usize },

    #[error("series of length {len} is too short for windows of order {order}")]
    SeriesTooShort { len: usize, order: usize },

    #[error("series lengths differ: x has {x}, y has {y}")]
    LengthMismatch { x: usize, y: usize },

    #[error("step must be at least 1")]
    InvalidStep,

    #[error("empty input")]
    EmptyInput,

    #[error("degenerate distribution: pattern cross term is 1, dependence is undefined")]
    DegenerateDistribution,

    #[error("invalid block: {0}")]
    InvalidBlock(String),

    #[error("invalid cell: {0}")]
    InvalidCell(String),

    #[error("total mass is {0}, expected 1")]
    MassNotOne(f64),

    #[error("cells {0} and {1} overlap on a set of positive measure")]
    OverlappingCells(usize, usize),

    #[error("cell {cell}: blocks on the same axis overlap without sharing an interval")]
    AmbiguousBlockOrder { cell: usize },

    #[error("chain blocks of length {0} are not supported for exact orthant volumes")]
    UnsupportedChainLength(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("conditioning event has zero probability")]
    ZeroMassCondition,

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid index subset: {0}")]
    InvalidSubset(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
