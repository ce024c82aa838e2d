//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by protocol, hashing, and harness operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A rotation count fell outside `{0, ..., 2^n - 1}`; the key is corrupt.
    #[error("rotation count {value} out of range for security parameter {n}")]
    KeyOutOfRange { value: u64, n: u32 },

    /// Two protocol artifacts that must agree in length did not.
    #[error("length mismatch in {context}: expected {expected}, got {actual}")]
    LengthMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A parameter violated its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A statistical test was asked to run on too small a sample.
    #[error("insufficient sample for {test}: need at least {required}, got {actual}")]
    InsufficientSample {
        test: &'static str,
        required: usize,
        actual: usize,
    },

    /// Probabilities handed to an ensemble constructor do not sum to one.
    #[error("ensemble probabilities sum to {sum}, expected 1 within 1e-9")]
    ProbabilitySum { sum: f64 },

    /// Malformed serialized artifact (transcript, report, or hex field).
    #[error("parse error: {0}")]
    Parse(String),

    /// Filesystem failure while writing reports or transcripts.
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}
