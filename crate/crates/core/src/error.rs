//! Error type shared across the crate.
//!
//! Every fallible operation returns [`GeoError`].  Variants are grouped by
//! origin: bad structure parameters, degenerate linear algebra, realization
//! and on-manifold violations, expression parsing/evaluation, degenerate
//! immersions, and invalid analysis arguments.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, GeoError>;

#[derive(Debug, Clone, Error)]
pub enum GeoError {
    /// p and q must be positive integers.
    #[error("metallic parameters must be positive integers, got p={p}, q={q}")]
    InvalidParams { p: i64, q: i64 },

    /// An endomorphism failed a structural identity (F² = I or φ² = pφ + qI).
    #[error("{role} check failed: max residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    StructureCheck {
        role: &'static str,
        residual: f64,
        tol: f64,
    },

    /// Mismatched dimensions between operands.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A Gram matrix was not symmetric positive definite.
    #[error("inner product is not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// Gram–Schmidt hit a vector that is numerically dependent on its
    /// predecessors.
    #[error("degenerate basis: vector {index} has pivot {pivot:.3e} below threshold {threshold:.1e}")]
    DegenerateBasis {
        index: usize,
        pivot: f64,
        threshold: f64,
    },

    /// A space specification cannot be realized (e.g. sphere factor with
    /// non-positive curvature).
    #[error("realization error: {0}")]
    Realization(String),

    /// A point or vector violates the realized manifold constraints.
    #[error("off-manifold: {0}")]
    OffManifold(String),

    /// Expression text failed to parse.
    #[error("parse error at {line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },

    /// Expression evaluation hit a domain fault (division by ~0, sqrt of a
    /// negative, 0 raised to a negative power).
    #[error("evaluation error at {line}:{col} in `{node}`: {message}")]
    Evaluation {
        line: usize,
        col: usize,
        node: String,
        message: String,
    },

    /// The immersion is degenerate at the sampled point.
    #[error("degenerate immersion: {0}")]
    DegenerateImmersion(String),

    /// An analysis request is inconsistent with the data (bad tuple, bad
    /// range, slant-class mismatch, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A claimed submanifold class is inconsistent with the measured angles.
    #[error("classification error: {0}")]
    Classification(String),
}
