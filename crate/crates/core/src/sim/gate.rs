//! Gate set used by the protocol circuits.
//!
//! Target convention: for controlled gates the target slice lists controls
//! first and the acted-on qubit last, e.g. `CNOT` takes `[control, target]`
//! and `MCP { controls: k }` takes `[c1, …, ck, target]`. Controlled-phase
//! gates are diagonal and symmetric under any permutation of their qubits;
//! the convention only matters for `CNOT` and `CSWAP`.

use crate::error::{Error, Result};
use crate::scalar::{c_one, c_zero, phase_factor, Amplitude, Scalar};

/// One primitive gate. Phase angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate<S: Scalar> {
    /// Hadamard.
    H,
    /// Pauli X.
    X,
    /// Phase gate P(θ) = diag(1, e^{iθ}).
    Phase(S),
    /// Controlled NOT, `[control, target]`.
    Cnot,
    /// Controlled phase, diagonal e^{iθ} on |11⟩.
    CPhase(S),
    /// Doubly controlled phase, diagonal e^{iθ} on |111⟩.
    CcPhase(S),
    /// Multi-controlled phase with `controls` control qubits; the phase
    /// lands on the all-ones component of the `controls + 1` qubits.
    McPhase { angle: S, controls: usize },
    /// Swap two qubits.
    Swap,
    /// Controlled swap (Fredkin), `[control, a, b]`.
    CSwap,
}

impl<S: Scalar> Gate<S> {
    /// Number of qubits the gate acts on.
    pub fn arity(&self) -> usize {
        match self {
            Gate::H | Gate::X | Gate::Phase(_) => 1,
            Gate::Cnot | Gate::CPhase(_) | Gate::Swap => 2,
            Gate::CcPhase(_) | Gate::CSwap => 3,
            Gate::McPhase { controls, .. } => controls + 1,
        }
    }

    /// Dense unitary of the gate on its own qubits, row-major,
    /// dimension `2^arity`. Basis index bit i corresponds to the i-th
    /// entry of the target slice.
    pub fn unitary(&self) -> Vec<Amplitude<S>> {
        let dim = 1usize << self.arity();
        let mut u = vec![c_zero::<S>(); dim * dim];
        match self {
            Gate::H => {
                let h = S::one() / S::SQRT_2();
                u[0] = Amplitude::new(h, S::zero());
                u[1] = Amplitude::new(h, S::zero());
                u[2] = Amplitude::new(h, S::zero());
                u[3] = Amplitude::new(-h, S::zero());
            }
            Gate::X => {
                u[1] = c_one();
                u[2] = c_one();
            }
            Gate::Phase(theta) => {
                u[0] = c_one();
                u[3] = phase_factor(*theta);
            }
            Gate::Cnot => {
                // Control is bit 0 of the local index, target bit 1.
                for i in 0..dim {
                    let j = if i & 1 == 1 { i ^ 2 } else { i };
                    u[j * dim + i] = c_one();
                }
            }
            Gate::Swap => {
                for i in 0..dim {
                    let j = ((i & 1) << 1) | ((i >> 1) & 1);
                    u[j * dim + i] = c_one();
                }
            }
            Gate::CSwap => {
                for i in 0..dim {
                    let j = if i & 1 == 1 {
                        (i & 1) | ((i & 2) << 1) | ((i & 4) >> 1)
                    } else {
                        i
                    };
                    u[j * dim + i] = c_one();
                }
            }
            Gate::CPhase(theta) | Gate::CcPhase(theta) | Gate::McPhase { angle: theta, .. } => {
                for i in 0..dim {
                    u[i * dim + i] = if i == dim - 1 {
                        phase_factor(*theta)
                    } else {
                        c_one()
                    };
                }
            }
        }
        u
    }

    /// Entrywise complex conjugate of the gate, used when conjugating a
    /// density matrix (ρ → UρU†). Real gates are self-conjugate; phase
    /// gates negate their angle.
    pub fn conjugated(&self) -> Self {
        match *self {
            Gate::Phase(t) => Gate::Phase(-t),
            Gate::CPhase(t) => Gate::CPhase(-t),
            Gate::CcPhase(t) => Gate::CcPhase(-t),
            Gate::McPhase { angle, controls } => Gate::McPhase {
                angle: -angle,
                controls,
            },
            other => other,
        }
    }

    /// True for gates that are diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        matches!(
            self,
            Gate::Phase(_) | Gate::CPhase(_) | Gate::CcPhase(_) | Gate::McPhase { .. }
        )
    }

    pub(crate) fn check_targets(&self, targets: &[usize], n_qubits: usize) -> Result<()> {
        if targets.len() != self.arity() {
            return Err(Error::QubitIndex(format!(
                "{self:?} takes {} qubits, got {}",
                self.arity(),
                targets.len()
            )));
        }
        for (i, &t) in targets.iter().enumerate() {
            if t >= n_qubits {
                return Err(Error::QubitIndex(format!(
                    "qubit {t} out of range for {n_qubits}-qubit register"
                )));
            }
            if targets[..i].contains(&t) {
                return Err(Error::QubitIndex(format!("duplicate qubit {t}")));
            }
        }
        Ok(())
    }
}

/// A gate bound to register qubits; chains and circuits are lists of these.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp<S: Scalar> {
    pub gate: Gate<S>,
    pub targets: Vec<usize>,
}

impl<S: Scalar> GateOp<S> {
    pub fn new(gate: Gate<S>, targets: impl Into<Vec<usize>>) -> Self {
        Self {
            gate,
            targets: targets.into(),
        }
    }
}

/// Equivalent circuit for the doubly controlled phase in terms of CP and
/// CNOT, as used on hardware without a native CC-phase:
/// CP(θ/2) on (c2,t); CNOT(c1,c2); CP(−θ/2) on (c2,t); CNOT(c1,c2);
/// CP(θ/2) on (c1,t).
pub fn ccp_decomposition<S: Scalar>(theta: S, c1: usize, c2: usize, t: usize) -> Vec<GateOp<S>> {
    let half = theta / S::from_f64_lossy(2.0);
    vec![
        GateOp::new(Gate::CPhase(half), vec![c2, t]),
        GateOp::new(Gate::Cnot, vec![c1, c2]),
        GateOp::new(Gate::CPhase(-half), vec![c2, t]),
        GateOp::new(Gate::Cnot, vec![c1, c2]),
        GateOp::new(Gate::CPhase(half), vec![c1, t]),
    ]
}
