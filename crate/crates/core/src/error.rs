use thiserror::Error;

use crate::space::SpaceSignature;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("signature mismatch: expected {expected}, found {found}")]
    SignatureMismatch {
        expected: SpaceSignature,
        found: SpaceSignature,
    },

    #[error("matrix of size {rows}x{cols} does not fit signature {signature}")]
    DimensionMismatch {
        signature: SpaceSignature,
        rows: usize,
        cols: usize,
    },

    #[error("state is not normalized: norm deviation {deviation:e}")]
    NotNormalized { deviation: f64 },

    #[error("density matrix invalid: {0}")]
    InvalidDensity(String),

    #[error("invalid subsystem index {index} for signature {signature}")]
    InvalidSubsystem {
        index: usize,
        signature: SpaceSignature,
    },

    #[error("Fock truncation too small: discarded weight {tail:e} exceeds {tolerance:e} (n_max = {n_max})")]
    Truncation {
        tail: f64,
        tolerance: f64,
        n_max: usize,
    },

    #[error("step size too large: dt * spectral radius = {product:.3e} exceeds {limit}")]
    StepSize { product: f64, limit: f64 },

    #[error("integration drift exceeded: {0}")]
    Drift(String),

    #[error("projection probability {probability:e} below floor {floor:e}")]
    ProbabilityBelowFloor { probability: f64, floor: f64 },
}
