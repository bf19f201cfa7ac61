//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model validation, solvers, and constructions.
///
/// Validation constructors report the *first* violated invariant they
/// encounter, so the message always identifies a concrete offending entry.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Shapes or alphabet sizes do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A probability vector failed validation (negative entry, bad sum, ...).
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A channel failed validation.
    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    /// A density matrix failed validation (not Hermitian, not PSD, bad trace).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// An argument is outside the documented domain of the operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The operation is not defined for these inputs (e.g. divergence
    /// variance of a genuinely non-commuting pair).
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// A tensor power or enumeration would exceed the configured entry cap.
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    /// An iterative solver stopped before reaching the requested certificate
    /// gap; the message carries the best certified bracket.
    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    /// A channel file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
