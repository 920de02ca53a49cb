//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Result`]. Variants are
//! grouped by failure class rather than by module so callers can match on
//! the *kind* of problem (bad input, numerical failure, I/O) without caring
//! which layer raised it.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter violates a documented invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two inputs that must agree in size do not.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A generated or loaded graph is not connected (or has an isolated
    /// node), and the retry budget is exhausted.
    #[error("could not obtain a connected graph: {0}")]
    Disconnected(String),

    /// Edge-list parsing failed.
    #[error("edge list parse error at line {line}: {reason}")]
    EdgeListParse { line: usize, reason: String },

    /// Underlying file I/O failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A root-finding bracket could not be established.
    #[error("no sign change found while bracketing: {0}")]
    NoBracket(String),

    /// An iterative numerical procedure did not reach its tolerance.
    #[error("failed to converge: {0}")]
    NonConvergent(String),

    /// An analytic expression was evaluated at (or too close to) a pole.
    #[error("singular denominator in {context} at {detail}")]
    Singular {
        context: &'static str,
        detail: String,
    },

    /// A trajectory produced a non-finite value.
    #[error("numerical blow-up at t = {t}: {detail}")]
    NumericalBlowup { t: f64, detail: String },

    /// The estimator scanned its whole grid without finding the requested
    /// crossing.
    #[error("no crossing in the scanned bracket: {0}")]
    NoCrossing(String),

    /// Zero-mode identification in an eigenvalue set was ambiguous.
    #[error("ambiguous zero mode: {count} eigenvalues below modulus {tol:e}")]
    AmbiguousZeroMode { count: usize, tol: f64 },

    /// Pattern recovery was asked to run with every site masked.
    #[error("recovery requires at least one unmasked site")]
    AllMasked,
}
