use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bit index {index} out of range 1..={len}")]
    BitIndex { index: usize, len: usize },
    #[error("prefix length {want} exceeds string length {len}")]
    PrefixLen { want: usize, len: usize },
    #[error("string length {len} exceeds family depth {depth}")]
    DepthExceeded { len: usize, depth: usize },
    #[error("query point outside the domain")]
    OutOfDomain,
    #[error("accuracy too coarse: {0}")]
    AccuracyTooCoarse(&'static str),
    #[error("accuracy too fine: {0}")]
    AccuracyTooFine(&'static str),
    #[error("malformed query: {0}")]
    MalformedQuery(&'static str),
    #[error("answer contradicts previously determined bits")]
    PosteriorContradiction,
    #[error("point fails the sublevel certificate for an eps-minimum")]
    NotEpsMinimum,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
