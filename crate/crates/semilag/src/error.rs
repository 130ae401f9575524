//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by grid construction, interpolation, the time stepper
/// and the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported grid: {0}")]
    UnsupportedGrid(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("derivative order {order} out of range (maximum {max})")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// The implicit foot equation did not converge. `node` is `None` when the
    /// solve was issued for a free query point rather than a grid node.
    #[error("foot solve did not converge{}: residual {residual:.3e}", match node { Some(m) => format!(" at node {m}"), None => String::new() })]
    Convergence { node: Option<usize>, residual: f64 },

    #[error("time step {dt:.3e} violates the step-size bound {dt_max:.3e}")]
    StepSize { dt: f64, dt_max: f64 },

    #[error("relative error undefined: reference norm is zero")]
    ZeroReferenceNorm,
}

pub type Result<T> = std::result::Result<T, Error>;
