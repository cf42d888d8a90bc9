//! Quantum-math core: state vectors, density matrices, gates, measurement,
//! and the depolarizing channel. Everything here is generic over the real
//! scalar type; the crate root exposes `f64` aliases for the protocol
//! layers.

pub mod density;
pub mod eigen;
pub mod gate;
pub(crate) mod kernels;
pub mod measure;
pub mod noise;
pub mod pauli;
pub mod state;

pub use density::{DensityMatrix, MAX_DENSITY_QUBITS};
pub use gate::{ccp_decomposition, Gate, GateOp};
pub use measure::{block_basis_probabilities, measure_in_block_basis, BlockBasisOutcome};
pub use noise::NoiseChannel;
pub use pauli::{Pauli, PauliString};
pub use state::{StateVector, MAX_STATE_QUBITS};
