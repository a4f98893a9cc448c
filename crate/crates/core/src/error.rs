//! Crate-wide error type.

use thiserror::Error;

use crate::construct::{ReasonCode, WitnessKind};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by matrix, state, construction, and verification
/// operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A dimension argument was zero.
    #[error("dimension must be at least 1")]
    ZeroDimension,

    /// A matrix extent exceeds the configured maximum.
    #[error("matrix size {rows}x{cols} exceeds the {max}x{max} limit")]
    SizeLimit {
        rows: usize,
        cols: usize,
        max: usize,
    },

    /// The entry buffer does not match rows*cols.
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },

    /// An entry has a NaN or infinite component.
    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    /// A basis index is outside the space dimension.
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    /// A square matrix was required.
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    /// Two shapes that must agree do not.
    #[error("shape mismatch in {op}: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    /// Hermiticity violated beyond tolerance.
    #[error(
        "matrix is not Hermitian: max entrywise |m - m^dagger| = {deviation:e} exceeds {tol:e}"
    )]
    NotHermitian { deviation: f64, tol: f64 },

    /// Unit trace violated beyond tolerance.
    #[error("operator trace differs from 1 by {deviation:e}")]
    TraceNotOne { deviation: f64 },

    /// Positive semidefiniteness violated beyond tolerance.
    #[error("operator has negative eigenvalue {value:e}")]
    NegativeEigenvalue { value: f64 },

    /// The spectral backend returned a decomposition that does not
    /// reconstruct the input.
    #[error("eigendecomposition failed: reconstruction residual {residual:e}")]
    EigenFailure { residual: f64 },

    /// A vector that must be normalized is not.
    #[error("vector norm is {norm}, expected 1")]
    NotNormalized { norm: f64 },

    /// A mixing weight is zero or negative.
    #[error("weights must be strictly positive (found {value})")]
    NonPositiveWeight { value: f64 },

    /// Mixing weights do not sum to one.
    #[error("weights sum to {sum}, expected 1 within 1e-12")]
    WeightSumNotOne { sum: f64 },

    /// A weight vector has the wrong length.
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },

    /// A construction precondition on the dimension ordering failed.
    #[error("dimension ordering violated: {detail}")]
    OrderingViolation { detail: String },

    /// Defensive check: an amplitude draw produced zero.
    #[error("amplitude draw produced a zero amplitude")]
    ZeroAmplitude,

    /// Requested mixing rank outside the valid range.
    #[error("mix rank {mix_rank} outside 1..={max}")]
    MixRankOutOfRange { mix_rank: usize, max: usize },

    /// A dimension token could not be parsed.
    #[error("invalid dimension token {token:?} (expected a positive integer or \"inf\")")]
    InvalidDimension { token: String },

    /// The requested witness does not exist for the given rank triple.
    #[error(
        "no {kind} witness for rank triple ({d1}, {d2}, {d3}): {}",
        format_reasons(reasons)
    )]
    Infeasible {
        d1: usize,
        d2: usize,
        d3: usize,
        kind: WitnessKind,
        reasons: Vec<ReasonCode>,
    },

    /// A witness build could not satisfy its postcondition.
    #[error("witness construction failed: {detail}")]
    ConstructionFailed { detail: String },
}

fn format_reasons(reasons: &[ReasonCode]) -> String {
    if reasons.is_empty() {
        return "no reasons recorded".to_owned();
    }
    reasons
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
