use thiserror::Error;

/// Errors surfaced by the simulator and protocol layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Register or job size outside the supported range.
    #[error("capacity: {0}")]
    Capacity(String),

    /// Qubit index out of range, duplicated, or gate arity mismatch.
    #[error("qubit index: {0}")]
    QubitIndex(String),

    /// A numeric parameter outside its valid range.
    #[error("parameter: {0}")]
    Parameter(String),

    /// A protocol constraint (e.g. the phase budget) was violated.
    #[error("constraint: {0}")]
    Constraint(String),

    /// Encoding input malformed (wrong length, bad symbol).
    #[error("codec: {0}")]
    Codec(String),

    /// Phase does not correspond to any encodable bit string.
    #[error("decode: {0}")]
    Decode(String),

    /// Block appended out of order.
    #[error("ordering: {0}")]
    Ordering(String),

    /// Stake ledger cannot satisfy the request (unknown peer, zero stake).
    #[error("consensus: {0}")]
    Consensus(String),

    /// A policy rule was violated (e.g. reward at or above the stake minimum).
    #[error("policy: {0}")]
    Policy(String),

    /// Protocol-level failure (width mismatch, bad message).
    #[error("protocol: {0}")]
    Protocol(String),

    /// Tomography job malformed (incomplete settings, bad label).
    #[error("tomography: {0}")]
    Tomography(String),

    /// Noise calibration could not reach the target.
    #[error("calibration: {0}")]
    Calibration(String),

    /// Configuration document failed validation; message carries the field path.
    #[error("config: {0}")]
    Config(String),

    /// Persisted chain log malformed or inconsistent.
    #[error("chain log: {0}")]
    ChainLog(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
