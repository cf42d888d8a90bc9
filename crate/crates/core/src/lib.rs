//! Deterministic simulator for a quantum non-fungible-token blockchain.
//!
//! The chain is a weighted double hypergraph state: every block is a Bell
//! pair whose relative phase carries the owner/asset record (class A qubit)
//! and a random token (class B qubit). Blocks are minted by a
//! proof-of-stake winner, verified by every peer with a projective
//! measurement in the block basis, and integrated with multi-controlled
//! phase gates. The crate also ships the attack harness (intercept-resend,
//! entangle-and-measure, man-in-the-middle), swap-test chain comparison,
//! and Pauli tomography with city/Hinton plot exports.
//!
//! The math core (`sim`) is generic over the real scalar; the aliases below
//! pin `f64`, which is what the protocol and the test suite use.

pub mod codec;
pub mod consensus;
pub mod error;
pub mod hypergraph;
pub mod ledger;
pub mod protocol;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod tomography;

pub use error::{Error, Result};
pub use rng::{derived_rng, master_rng, SimRng};
pub use scalar::Scalar;

/// Complex amplitude at the default precision.
pub type Amplitude = num_complex::Complex64;
/// State vector at the default precision.
pub type StateVector = sim::StateVector<f64>;
/// Density matrix at the default precision.
pub type DensityMatrix = sim::DensityMatrix<f64>;
/// Gate at the default precision.
pub type Gate = sim::Gate<f64>;
/// Bound gate at the default precision.
pub type GateOp = sim::GateOp<f64>;
/// Depolarizing channel at the default precision.
pub type NoiseChannel = sim::NoiseChannel<f64>;
