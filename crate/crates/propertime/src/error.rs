//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// Constraint assembly produced no usable rows.
    #[error("constraint system is degenerate: all rows are numerically zero")]
    DegenerateSystem,

    /// The invariance pipeline ended with a kernel of unexpected dimension.
    #[error("unexpected kernel dimension {dim} after {stage} (expected {expected})")]
    UnexpectedKernel {
        stage: &'static str,
        dim: usize,
        expected: usize,
    },

    /// Mass parameters must be strictly positive.
    #[error("mass must be strictly positive, got {mass}")]
    NonpositiveMass { mass: f64 },

    /// Grid cannot resolve the requested physics.
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    /// A branch projector annihilated every available spinor seed.
    #[error("branch projector annihilated all spinor seeds at a retained mode")]
    ZeroProjection,

    /// Time interval endpoints are out of order.
    #[error("bad time interval: t1 = {t1} precedes t0 = {t0}")]
    BadInterval { t0: f64, t1: f64 },

    /// Sampling rate too low for the oscillation content of the series.
    #[error("aliased sampling: rate {rate} <= required {required}")]
    Aliased { rate: f64, required: f64 },

    /// Matrix exponential failed its unitarity residual check.
    #[error("matrix exponential diverged: unitarity residual {residual:.3e}")]
    ExpDiverged { residual: f64 },

    /// Spectral splitting hit an eigenvalue indistinguishable from zero.
    #[error("eigenvalue {value:.3e} too close to zero for positive/negative splitting")]
    ZeroEigenvalue { value: f64 },

    /// Config file or flag could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A validated precondition was violated.
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
