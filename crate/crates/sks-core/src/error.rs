//! Error type shared by the core numerics.

use thiserror::Error;

/// Errors raised by grid construction, field algebra, noise sampling, and
/// stepping. Everything carries enough context to name the offending
/// quantity without a backtrace.
#[derive(Debug, Error)]
pub enum Error {
    /// A spectral index outside the grid's band `|k| <= k_max`.
    #[error("mode index k = {k} outside the spectral band |k| <= {k_max}")]
    ModeOutOfRange { k: i64, k_max: usize },

    /// A nodal array whose length does not match the grid.
    #[error("nodal array has length {got}, grid has {expected} nodes")]
    ShapeMismatch { got: usize, expected: usize },

    /// Two fields built on incompatible grids were combined.
    #[error("operands live on different grids ({left} vs {right})")]
    GridMismatch { left: String, right: String },

    /// A scalar parameter violating its documented constraint.
    #[error("invalid parameter {name} = {value}: requires {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Input outside the mathematical domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Non-finite coefficients produced by a time step.
    #[error("solution blew up at t = {t:.6e} (non-finite coefficients)")]
    BlowUp { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
