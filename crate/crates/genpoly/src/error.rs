//! Error types shared across the crate.
//!
//! Every fallible public operation returns [`Error`]. The variants are
//! coarse-grained on purpose: callers (in particular the CLI) only need to
//! distinguish bad input, exceeded resource limits, honest analysis failures
//! and internal invariant violations.

use serde::Serialize;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All errors produced by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed textual input (truth tables, polynomials, instance files,
    /// canonical forms).
    #[error("parse error: {0}")]
    Parse(String),

    /// Structurally well-formed input that violates a documented contract
    /// (inconsistent arities, invalid canonical-form data, out-of-range
    /// indices, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// The request is well-formed but exceeds a hard resource limit
    /// (grid too large for exhaustive checking, enumeration budget, ...).
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// The input tuple is not a generalized polymorphism, so the requested
    /// structural analysis does not apply.
    #[error("not a generalized polymorphism")]
    NotPolymorphism,

    /// The tuple is a generalized polymorphism but could not be brought into
    /// canonical form. This is reported honestly instead of being papered
    /// over; the payload says which stage gave up and why.
    #[error("classification failed at {}: {}", .0.stage, .0.detail)]
    Classify(ClassifyFailure),

    /// Two internal computations that must agree did not. Indicates a bug in
    /// this crate rather than in the input.
    #[error("internal inconsistency: {0}")]
    Internal(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Structured report for a failed classification attempt.
///
/// `stage` names the classification phase that failed (e.g. `"block"`,
/// `"round-trip"`), `detail` is a human-readable explanation of the exact
/// mismatch.
#[derive(Debug, Clone, Serialize)]
pub struct ClassifyFailure {
    /// Classification phase that gave up.
    pub stage: String,
    /// Human-readable description of the mismatch.
    pub detail: String,
}

impl Error {
    /// Shorthand constructor for [`Error::Classify`].
    pub fn classify(stage: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Classify(ClassifyFailure {
            stage: stage.into(),
            detail: detail.into(),
        })
    }
}
