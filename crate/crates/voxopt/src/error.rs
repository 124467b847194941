//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VoxError {
    #[error("invalid grid shape {nx}x{ny}x{nz}: all dimensions must be >= 1")]
    InvalidShape { nx: usize, ny: usize, nz: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("design bits must be 0 or 1, found {0}")]
    NonBinaryValue(u8),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("agent index {index} out of range for {count} agents")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("cannot sample from an empty experience buffer")]
    EmptyBuffer,

    #[error("algorithm {algo} requires a differentiable environment, but {env} is not")]
    IncompatibleAlgorithm { algo: String, env: String },

    #[error("environment does not provide payoff gradients")]
    NotDifferentiable,

    #[error("flux requested before the source ramp completed (step {step} < {required})")]
    NotSteadyState { step: usize, required: usize },

    #[error("simulation diverged: max |Ez| = {max_abs:.3e} exceeded the guard {bound:.3e}")]
    SimulationDiverged { max_abs: f64, bound: f64 },

    #[error("need at least {required} recorded designs, have {got}")]
    InsufficientHistory { required: usize, got: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
