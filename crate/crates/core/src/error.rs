//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the exact-geometry operations.
///
/// Anything tagged `Internal` indicates a broken invariant rather than bad
/// input; callers map it to a distinct process exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero vector where a direction is required")]
    ZeroVector,
    #[error("rays are parallel")]
    ParallelRays,
    #[error("unbounded body is not a split")]
    UnboundedNonSplit,
    #[error("tilt direction is not in the tilting nullspace")]
    NotInNullspace,
    #[error("cover misses integer points of the body")]
    CoverIncomplete,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("linear system is singular")]
    SingularSystem,
    #[error("post-validation failed: {0}")]
    PostValidation(String),
    #[error("rays do not positively span the plane")]
    ConeNotFull,
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
