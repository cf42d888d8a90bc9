//! Complex-amplitude state vector over n qubits.
//!
//! Qubit 0 is the least-significant bit of the basis-state index: the
//! amplitude for |q_{n-1} … q_1 q_0⟩ lives at index Σ q_i · 2^i. All circuit
//! descriptions are indexed in this convention.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{c_one, c_zero, Amplitude, Scalar};
use crate::sim::gate::{Gate, GateOp};
use crate::sim::kernels;

/// Dispatch a gate to its strided kernel. Shared with the density-matrix
/// representation, which applies gates on shifted qubit indices.
pub(crate) fn apply_gate_kernel<S: Scalar>(
    amps: &mut [Amplitude<S>],
    gate: Gate<S>,
    targets: &[usize],
) {
    match gate {
        Gate::H => kernels::hadamard(amps, targets[0]),
        Gate::X => kernels::pauli_x(amps, targets[0]),
        Gate::Phase(theta) => kernels::phase_masked(amps, 1usize << targets[0], theta),
        Gate::CPhase(theta) | Gate::CcPhase(theta) | Gate::McPhase { angle: theta, .. } => {
            let mask = targets.iter().fold(0usize, |m, &t| m | (1 << t));
            kernels::phase_masked(amps, mask, theta)
        }
        Gate::Cnot => kernels::cnot(amps, targets[0], targets[1]),
        Gate::Swap => kernels::swap(amps, targets[0], targets[1], None),
        Gate::CSwap => kernels::swap(amps, targets[1], targets[2], Some(targets[0])),
    }
}

/// Largest register the state-vector engine accepts.
pub const MAX_STATE_QUBITS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<S: Scalar> {
    n_qubits: usize,
    amplitudes: Vec<Amplitude<S>>,
}

impl<S: Scalar> StateVector<S> {
    /// |0…0⟩ on `n_qubits` qubits (1 ≤ n ≤ 16).
    pub fn new(n_qubits: usize) -> Result<Self> {
        if !(1..=MAX_STATE_QUBITS).contains(&n_qubits) {
            return Err(Error::Capacity(format!(
                "state vector supports 1..={MAX_STATE_QUBITS} qubits, got {n_qubits}"
            )));
        }
        let mut amplitudes = vec![c_zero(); 1 << n_qubits];
        amplitudes[0] = c_one();
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Build from raw amplitudes; the length must be a power of two within
    /// capacity and the vector must be normalized to 1e-10.
    pub fn from_amplitudes(amplitudes: Vec<Amplitude<S>>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || !(2..=(1 << MAX_STATE_QUBITS)).contains(&len) {
            return Err(Error::Capacity(format!(
                "amplitude vector length {len} is not a supported register size"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        let state = Self {
            n_qubits,
            amplitudes,
        };
        let norm_err = (state.norm_sqr().to_f64_lossy() - 1.0).abs();
        if norm_err > 1e-10 {
            return Err(Error::Parameter(format!(
                "amplitudes not normalized: |‖ψ‖²−1| = {norm_err:.3e}"
            )));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude<S>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> S {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &Self) -> Result<Amplitude<S>> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Parameter(format!(
                "overlap between {}- and {}-qubit states",
                self.n_qubits, other.n_qubits
            )));
        }
        let mut acc = c_zero();
        for (a, b) in self.amplitudes.iter().zip(&other.amplitudes) {
            acc += a.conj() * *b;
        }
        Ok(acc)
    }

    /// Tensor product with `other` appended as the higher-order qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_STATE_QUBITS {
            return Err(Error::Capacity(format!(
                "tensor product would need {n} qubits"
            )));
        }
        let mut amplitudes = vec![c_zero(); 1 << n];
        let lo = 1usize << self.n_qubits;
        for (j, bj) in other.amplitudes.iter().enumerate() {
            if bj.norm_sqr() == S::zero() {
                continue;
            }
            for (i, ai) in self.amplitudes.iter().enumerate() {
                amplitudes[j * lo + i] = *ai * *bj;
            }
        }
        Ok(Self {
            n_qubits: n,
            amplitudes,
        })
    }

    /// Marginal probability that `qubit` reads 1.
    pub fn prob_one(&self, qubit: usize) -> Result<S> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex(format!(
                "qubit {qubit} out of range for {}-qubit register",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Apply a gate in place. Norm is preserved by construction.
    pub fn apply(&mut self, gate: Gate<S>, targets: &[usize]) -> Result<()> {
        gate.check_targets(targets, self.n_qubits)?;
        apply_gate_kernel(&mut self.amplitudes, gate, targets);
        Ok(())
    }

    pub fn apply_op(&mut self, op: &GateOp<S>) -> Result<()> {
        self.apply(op.gate, &op.targets)
    }

    pub fn apply_all(&mut self, ops: &[GateOp<S>]) -> Result<()> {
        for op in ops {
            self.apply_op(op)?;
        }
        Ok(())
    }

    /// Apply an arbitrary dense unitary on `targets` (row-major,
    /// `2^k × 2^k` for k targets). Local basis bit j corresponds to
    /// `targets[j]`.
    pub fn apply_dense_unitary(
        &mut self,
        matrix: &[Amplitude<S>],
        targets: &[usize],
    ) -> Result<()> {
        let k = targets.len();
        let dim = 1usize << k;
        if matrix.len() != dim * dim {
            return Err(Error::Parameter(format!(
                "unitary on {k} qubits needs {} entries, got {}",
                dim * dim,
                matrix.len()
            )));
        }
        for (i, &t) in targets.iter().enumerate() {
            self.check_qubit(t)?;
            if targets[..i].contains(&t) {
                return Err(Error::QubitIndex(format!("duplicate qubit {t}")));
            }
        }
        crate::sim::kernels::dense_unitary(&mut self.amplitudes, matrix, targets);
        Ok(())
    }

    /// Entangle two fresh qubits into (|00⟩+|11⟩)/√2.
    ///
    /// Both qubits are expected to be in |0⟩ marginally; the constructor
    /// applies H on `q_a` followed by CNOT(q_a → q_b).
    pub fn bell_pair(&mut self, q_a: usize, q_b: usize) -> Result<()> {
        if q_a == q_b {
            return Err(Error::QubitIndex(format!(
                "bell pair on single qubit {q_a}"
            )));
        }
        self.apply(Gate::H, &[q_a])?;
        self.apply(Gate::Cnot, &[q_a, q_b])
    }

    /// Measure one qubit in the computational basis; collapses in place.
    pub fn measure_computational<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        rng: &mut R,
    ) -> Result<u8> {
        let p_one = self.prob_one(qubit)?.to_f64_lossy();
        let outcome = u8::from(rng.gen::<f64>() < p_one);
        self.project_computational(qubit, outcome)?;
        Ok(outcome)
    }

    /// Project onto `qubit = outcome` and renormalize.
    pub fn project_computational(&mut self, qubit: usize, outcome: u8) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        let want = if outcome == 0 { 0 } else { mask };
        let mut kept = S::zero();
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == want {
                kept += amp.norm_sqr();
            } else {
                *amp = c_zero();
            }
        }
        if kept <= S::zero() {
            return Err(Error::Parameter(format!(
                "projection onto qubit {qubit} = {outcome} has zero probability"
            )));
        }
        let scale = S::one() / kept.sqrt();
        for amp in &mut self.amplitudes {
            *amp = amp.scale(scale);
        }
        Ok(())
    }

    /// Structured text dump, one line per amplitude: `index re im`.
    pub fn dump_amplitudes(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amplitudes.iter().enumerate() {
            out.push_str(&format!(
                "{i} {:.17e} {:.17e}\n",
                a.re.to_f64_lossy(),
                a.im.to_f64_lossy()
            ));
        }
        out
    }
}
