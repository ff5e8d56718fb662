use serde::{Deserialize, Serialize};

/// Failure modes of the exact pipeline.
///
/// Every variant is data-free or carries plain text, so errors stay `Clone`
/// and serializable; trajectory records embed them directly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(rename_all = "snake_case")]
pub enum Error {
    #[error("operation requires a square matrix")]
    NonSquare,
    #[error("matrix dimensions do not match")]
    DimensionMismatch,
    #[error("matrix is singular")]
    Singular,
    #[error("block partition is invalid for this matrix")]
    BadPartition,
    #[error("required diagonal block or Schur complement is singular")]
    SingularBlock,
    #[error("zero-order coefficient rank does not match the requested partition")]
    RankMismatch,
    #[error("initial data is degenerate: determinant valuation differs from the partition size")]
    DegenerateData,
    #[error("truncation window is too short to certify the result")]
    InsufficientTruncation,
    #[error("all candidate pivots vanish to the certified window")]
    SingularToWindow,
    #[error("cannot truncate to a window wider than the certified one")]
    WindowGrow,
    #[error("certificate hypotheses are void: the trailing diagonal block is singular")]
    HypothesesVoid,
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
