//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A state parameter violates its invariant (e.g. |alpha| >= 1).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An operation was given states or labels of incompatible chirality.
    #[error("chirality mismatch: {0}")]
    ChiralityMismatch(String),

    /// Argument outside the supported domain of a special function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two fields do not live on the same grid instance.
    #[error("grid mismatch: fields live on different grids")]
    GridMismatch,

    /// A truncated series could not meet the requested tail tolerance.
    #[error("truncation insufficient: tail bound {tail_bound:.3e} exceeds tolerance {tolerance:.3e}")]
    TruncationInsufficient { tail_bound: f64, tolerance: f64 },

    /// A grid or series would exceed the configured resource caps.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// The width matrix is not positive definite.
    #[error("singular width matrix: det U = {0:.3e}")]
    SingularWidth(f64),

    /// No closed-form expectation value is available for this operator.
    #[error("unsupported operator for closed-form expectation: {0}")]
    UnsupportedOperator(String),

    /// Closed-form packet formulas require real (alpha, beta); use
    /// [`crate::state::real_gauge`] to reduce complex parameters first.
    #[error("operation requires real alpha and beta; reduce to the real gauge first")]
    NonRealGauge,
}

pub type Result<T> = std::result::Result<T, Error>;
