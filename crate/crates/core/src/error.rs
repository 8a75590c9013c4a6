use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("context mismatch: rank {left} vs rank {right}")]
    ContextMismatch { left: usize, right: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("operation requires a non-empty word")]
    EmptyWord,
    #[error("map is not an automorphism")]
    NotAutomorphism,
    #[error("map is not an involution")]
    NotInvolution,
    #[error("invalid canonical data: {0}")]
    InvalidCanonicalData(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("all {0} generators occur in the word; no free generator is left for the splitting")]
    NoFreeGenerator(usize),
    #[error("parameters violate property ({0}): {1}")]
    PropertyViolated(char, String),
    #[error("automorphism is not a function encoding at generator x{index}: {reason}")]
    NotFunctionEncoding { index: usize, reason: String },
    #[error("internal disagreement: {0}")]
    InternalDisagreement(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
}
