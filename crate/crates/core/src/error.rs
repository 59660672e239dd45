use thiserror::Error;

use crate::model::Unit;

/// Errors raised by synthesis, simulation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unit mismatch: expected {expected:?}, got {found:?}")]
    UnitError { expected: Unit, found: Unit },

    #[error("grid mismatch: {0}")]
    GridError(String),

    #[error("truncation: {0}")]
    TruncationError(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("unrealizable wavepacket: {0}")]
    UnrealizableWavepacket(String),

    #[error("phase singular: {0}")]
    PhaseSingular(String),

    #[error("consistency error: {0}")]
    ConsistencyError(String),

    #[error("inconsistent amplitudes: {0}")]
    InconsistentAmplitudes(String),

    #[error("stiffness: {0}")]
    StiffnessError(String),

    #[error("mode grid: {0}")]
    ModeGridError(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for this error class.
    ///
    /// 1 for configuration and input problems, 2 when the requested
    /// wavepacket cannot be produced by the emitter, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnrealizableWavepacket(_) => 2,
            Error::PhaseSingular(_)
            | Error::ConsistencyError(_)
            | Error::InconsistentAmplitudes(_)
            | Error::StiffnessError(_)
            | Error::ModeGridError(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
