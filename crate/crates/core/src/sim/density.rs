//! Density-matrix representation for noisy simulation and tomography.
//!
//! Entries are stored row-major. Gate conjugation ρ → UρU† reuses the
//! state-vector kernels on the flattened matrix: entry (i, j) sits at index
//! i·2^n + j, so the row side is the register shifted up by n qubits and the
//! column side is the register itself with the conjugated gate.

use crate::error::{Error, Result};
use crate::scalar::{c_zero, Amplitude, Scalar};
use crate::sim::eigen;
use crate::sim::gate::{Gate, GateOp};
use crate::sim::pauli::{Pauli, PauliString};
use crate::sim::state::{apply_gate_kernel, StateVector};

/// Largest register the density-matrix engine accepts.
pub const MAX_DENSITY_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<S: Scalar> {
    n_qubits: usize,
    dim: usize,
    entries: Vec<Amplitude<S>>,
}

impl<S: Scalar> DensityMatrix<S> {
    /// |0…0⟩⟨0…0| on `n_qubits` qubits (1 ≤ n ≤ 8).
    pub fn new(n_qubits: usize) -> Result<Self> {
        Self::check_capacity(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut entries = vec![c_zero(); dim * dim];
        entries[0] = Amplitude::new(S::one(), S::zero());
        Ok(Self {
            n_qubits,
            dim,
            entries,
        })
    }

    fn check_capacity(n_qubits: usize) -> Result<()> {
        if !(1..=MAX_DENSITY_QUBITS).contains(&n_qubits) {
            return Err(Error::Capacity(format!(
                "density matrix supports 1..={MAX_DENSITY_QUBITS} qubits, got {n_qubits}"
            )));
        }
        Ok(())
    }

    /// ρ = |ψ⟩⟨ψ|.
    pub fn from_state(state: &StateVector<S>) -> Result<Self> {
        Self::check_capacity(state.n_qubits())?;
        let dim = state.amplitudes().len();
        let mut entries = vec![c_zero(); dim * dim];
        for (i, ai) in state.amplitudes().iter().enumerate() {
            for (j, aj) in state.amplitudes().iter().enumerate() {
                entries[i * dim + j] = *ai * aj.conj();
            }
        }
        Ok(Self {
            n_qubits: state.n_qubits(),
            dim,
            entries,
        })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        Self::check_capacity(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut entries = vec![c_zero(); dim * dim];
        let p = S::one() / S::from_f64_lossy(dim as f64);
        for i in 0..dim {
            entries[i * dim + i] = Amplitude::new(p, S::zero());
        }
        Ok(Self {
            n_qubits,
            dim,
            entries,
        })
    }

    pub fn from_entries(n_qubits: usize, entries: Vec<Amplitude<S>>) -> Result<Self> {
        Self::check_capacity(n_qubits)?;
        let dim = 1usize << n_qubits;
        if entries.len() != dim * dim {
            return Err(Error::Parameter(format!(
                "expected {} entries for {n_qubits} qubits, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self {
            n_qubits,
            dim,
            entries,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Amplitude<S>] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude<S> {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> S {
        (0..self.dim)
            .map(|i| self.entries[i * self.dim + i].re)
            .sum()
    }

    /// ρ → UρU† for one gate.
    pub fn apply(&mut self, gate: Gate<S>, targets: &[usize]) -> Result<()> {
        gate.check_targets(targets, self.n_qubits)?;
        // Row side: same gate on qubits shifted past the column register.
        let shifted: Vec<usize> = targets.iter().map(|t| t + self.n_qubits).collect();
        apply_gate_kernel(&mut self.entries, gate, &shifted);
        // Column side: conjugated gate on the original qubits.
        apply_gate_kernel(&mut self.entries, gate.conjugated(), targets);
        Ok(())
    }

    pub fn apply_op(&mut self, op: &GateOp<S>) -> Result<()> {
        self.apply(op.gate, &op.targets)
    }

    /// Single-qubit depolarizing channel
    /// ρ → (1−p)ρ + (p/3)(XρX + YρY + ZρZ).
    pub fn apply_depolarizing(&mut self, p: S, target: usize) -> Result<()> {
        let pf = p.to_f64_lossy();
        if !(0.0..=1.0).contains(&pf) {
            return Err(Error::Parameter(format!(
                "depolarizing probability {pf} outside [0, 1]"
            )));
        }
        Gate::<S>::X.check_targets(&[target], self.n_qubits)?;
        let third = p / S::from_f64_lossy(3.0);
        let keep = S::one() - p;

        let x_conj = self.conjugated_by_x(target);
        let z_conj = self.conjugated_by_z(target);
        let y_conj = {
            // YρY = X(ZρZ)X, with the i phases of Y = iXZ cancelling.
            let mut tmp = Self {
                n_qubits: self.n_qubits,
                dim: self.dim,
                entries: z_conj.clone(),
            };
            tmp.conjugate_by_x_in_place(target);
            tmp.entries
        };

        for (idx, entry) in self.entries.iter_mut().enumerate() {
            *entry = entry.scale(keep)
                + x_conj[idx].scale(third)
                + y_conj[idx].scale(third)
                + z_conj[idx].scale(third);
        }
        Ok(())
    }

    fn conjugated_by_x(&self, target: usize) -> Vec<Amplitude<S>> {
        let mut copy = self.entries.clone();
        let row = 1usize << (target + self.n_qubits);
        let col = 1usize << target;
        permute_xor(&mut copy, row | col);
        copy
    }

    fn conjugate_by_x_in_place(&mut self, target: usize) {
        let row = 1usize << (target + self.n_qubits);
        let col = 1usize << target;
        permute_xor(&mut self.entries, row | col);
    }

    fn conjugated_by_z(&self, target: usize) -> Vec<Amplitude<S>> {
        let mut copy = self.entries.clone();
        let row = 1usize << (target + self.n_qubits);
        let col = 1usize << target;
        for (idx, entry) in copy.iter_mut().enumerate() {
            let bit_i = (idx & row) != 0;
            let bit_j = (idx & col) != 0;
            if bit_i != bit_j {
                *entry = -*entry;
            }
        }
        copy
    }

    /// Tr(ρ·P) for a Pauli string over all qubits; the result is real for
    /// Hermitian ρ and is returned as such.
    pub fn expectation_pauli(&self, pauli: &PauliString) -> Result<S> {
        if pauli.n_qubits() != self.n_qubits {
            return Err(Error::Parameter(format!(
                "Pauli string on {} qubits, register has {}",
                pauli.n_qubits(),
                self.n_qubits
            )));
        }
        let flip = pauli.flip_mask();
        let mut acc = c_zero::<S>();
        for i in 0..self.dim {
            // P[i⊕flip][i] = Π_q f_q(bit_q(i)).
            let mut factor = Amplitude::new(S::one(), S::zero());
            for q in 0..self.n_qubits {
                let bit = (i >> q) & 1;
                match pauli.label(q) {
                    Pauli::I | Pauli::X => {}
                    Pauli::Y => {
                        factor = if bit == 0 {
                            factor * Amplitude::new(S::zero(), S::one())
                        } else {
                            factor * Amplitude::new(S::zero(), -S::one())
                        };
                    }
                    Pauli::Z => {
                        if bit == 1 {
                            factor = -factor;
                        }
                    }
                }
            }
            acc += self.entries[i * self.dim + (i ^ flip)] * factor;
        }
        Ok(acc.re)
    }

    /// ⟨ψ|ρ|ψ⟩ against a pure target.
    pub fn fidelity_pure(&self, target: &StateVector<S>) -> Result<S> {
        if target.n_qubits() != self.n_qubits {
            return Err(Error::Parameter(format!(
                "fidelity between {}-qubit ρ and {}-qubit |ψ⟩",
                self.n_qubits,
                target.n_qubits()
            )));
        }
        let mut acc = c_zero::<S>();
        for (i, ai) in target.amplitudes().iter().enumerate() {
            for (j, aj) in target.amplitudes().iter().enumerate() {
                acc += ai.conj() * self.entries[i * self.dim + j] * *aj;
            }
        }
        Ok(acc.re)
    }

    /// Reduced state on `keep` (ascending qubit indices), tracing out the
    /// rest. Qubit k of the result is `keep[k]`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        for (i, &q) in keep.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitIndex(format!("qubit {q} out of range")));
            }
            if keep[..i].contains(&q) {
                return Err(Error::QubitIndex(format!("duplicate qubit {q}")));
            }
        }
        if keep.is_empty() || keep.len() == self.n_qubits {
            return Err(Error::Parameter(
                "partial trace must keep a strict non-empty subset".into(),
            ));
        }
        let traced: Vec<usize> = (0..self.n_qubits).filter(|q| !keep.contains(q)).collect();
        let kd = 1usize << keep.len();
        let td = 1usize << traced.len();
        let embed = |sub: usize, qubits: &[usize]| -> usize {
            let mut idx = 0usize;
            for (b, &q) in qubits.iter().enumerate() {
                if sub & (1 << b) != 0 {
                    idx |= 1 << q;
                }
            }
            idx
        };
        let mut entries = vec![c_zero::<S>(); kd * kd];
        for a in 0..kd {
            let ia = embed(a, keep);
            for b in 0..kd {
                let ib = embed(b, keep);
                let mut acc = c_zero::<S>();
                for t in 0..td {
                    let it = embed(t, &traced);
                    acc += self.entries[(ia | it) * self.dim + (ib | it)];
                }
                entries[a * kd + b] = acc;
            }
        }
        Ok(Self {
            n_qubits: keep.len(),
            dim: kd,
            entries,
        })
    }

    /// Largest Hermitian deviation |ρ − ρ†|.
    pub fn hermiticity_error(&self) -> S {
        let mut worst = S::zero();
        for r in 0..self.dim {
            for c in r..self.dim {
                let dev =
                    (self.entries[r * self.dim + c] - self.entries[c * self.dim + r].conj()).norm();
                if dev > worst {
                    worst = dev;
                }
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<S> {
        eigen::eigh(&self.entries, self.dim).values
    }

    /// Validate the density-matrix invariants: Hermitian within 1e-10,
    /// unit trace within 1e-10, eigenvalues ≥ −1e-8.
    pub fn check_invariants(&self) -> Result<()> {
        let herm = self.hermiticity_error().to_f64_lossy();
        if herm > 1e-10 {
            return Err(Error::Parameter(format!(
                "density matrix not Hermitian: deviation {herm:.3e}"
            )));
        }
        let tr = self.trace().to_f64_lossy();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::Parameter(format!("density matrix trace {tr} ≠ 1")));
        }
        let min = self.eigenvalues().first().map_or(0.0, |v| v.to_f64_lossy());
        if min < -1e-8 {
            return Err(Error::Parameter(format!(
                "density matrix eigenvalue {min:.3e} below PSD floor"
            )));
        }
        Ok(())
    }

    /// Nearest PSD, trace-one matrix: clip the infeasible low end of the
    /// spectrum to zero and spread the deficit over the retained
    /// eigenvalues. Returns the projected matrix and the negative
    /// eigenvalue mass that was clipped; the fidelity cost of the
    /// projection never exceeds that mass.
    pub fn project_psd(&self) -> (Self, S) {
        let eig = eigen::eigh(&self.entries, self.dim);
        let clipped: S = eig
            .values
            .iter()
            .filter(|v| **v < S::zero())
            .map(|v| v.abs())
            .sum();
        let trace: S = eig.values.iter().copied().sum();
        let mut vals: Vec<S> = if trace > S::zero() {
            // Eigenvalues arrive ascending; normalize the spectrum sum.
            eig.values.iter().map(|v| *v / trace).collect()
        } else {
            vec![S::one() / S::from_f64_lossy(self.dim as f64); self.dim]
        };
        let mut deficit = S::zero();
        for i in 0..self.dim {
            let remaining = S::from_f64_lossy((self.dim - i) as f64);
            if vals[i] + deficit / remaining < S::zero() {
                deficit += vals[i];
                vals[i] = S::zero();
            } else {
                let shift = deficit / remaining;
                for v in vals.iter_mut().skip(i) {
                    *v += shift;
                }
                break;
            }
        }
        let mut entries = vec![c_zero::<S>(); self.dim * self.dim];
        for (k, &val) in vals.iter().enumerate() {
            if val == S::zero() {
                continue;
            }
            for r in 0..self.dim {
                for c in 0..self.dim {
                    entries[r * self.dim + c] += eig.vectors[r * self.dim + k]
                        * eig.vectors[c * self.dim + k].conj()
                        * Amplitude::new(val, S::zero());
                }
            }
        }
        (
            Self {
                n_qubits: self.n_qubits,
                dim: self.dim,
                entries,
            },
            clipped,
        )
    }

    /// Trace distance ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> Result<S> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::Parameter("trace distance dimension mismatch".into()));
        }
        let diff: Vec<Amplitude<S>> = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| *a - *b)
            .collect();
        let vals = eigen::eigh(&diff, self.dim).values;
        let half = S::from_f64_lossy(0.5);
        Ok(vals.iter().map(|v| v.abs()).sum::<S>() * half)
    }
}

/// Permute entries by XOR mask; an involution, applied via ordered swaps.
fn permute_xor<S: Scalar>(entries: &mut [Amplitude<S>], mask: usize) {
    for i in 0..entries.len() {
        let j = i ^ mask;
        if i < j {
            entries.swap(i, j);
        }
    }
}
