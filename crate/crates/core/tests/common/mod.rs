//! Brute-force reference engine for the integration tests.
//!
//! Everything here is deliberately independent of the library's strided
//! kernels: gate matrices are written out by hand, embedding builds the
//! full 2^n × 2^n unitary, and application is a dense mat-vec. Slow and
//! obvious beats fast and clever for an oracle.

#![allow(dead_code)]

use num_complex::Complex64;
use qnft_core::sim::{Gate, GateOp};

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn phase(theta: f64) -> C {
    C::from_polar(1.0, theta)
}

// ── Hand-written gate matrices (row-major, local bit b = targets[b]) ────

pub fn mat_h() -> Vec<C> {
    let h = 1.0 / 2.0f64.sqrt();
    vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]
}

pub fn mat_x() -> Vec<C> {
    vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]
}

pub fn mat_phase(theta: f64) -> Vec<C> {
    vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), phase(theta)]
}

/// CNOT with control = local bit 0, target = local bit 1:
/// |c, t⟩ → |c, t ⊕ c⟩ (index = c + 2t).
pub fn mat_cnot() -> Vec<C> {
    let mut m = vec![c(0.0, 0.0); 16];
    for col in 0..4usize {
        let ctrl = col & 1;
        let tgt = (col >> 1) & 1;
        let row = ctrl + 2 * (tgt ^ ctrl);
        m[row * 4 + col] = c(1.0, 0.0);
    }
    m
}

pub fn mat_swap() -> Vec<C> {
    let mut m = vec![c(0.0, 0.0); 16];
    for col in 0..4usize {
        let row = ((col & 1) << 1) | ((col >> 1) & 1);
        m[row * 4 + col] = c(1.0, 0.0);
    }
    m
}

/// Fredkin with control = local bit 0, swapped pair = bits 1 and 2.
pub fn mat_cswap() -> Vec<C> {
    let mut m = vec![c(0.0, 0.0); 64];
    for col in 0..8usize {
        let ctrl = col & 1;
        let a = (col >> 1) & 1;
        let b = (col >> 2) & 1;
        let row = if ctrl == 1 { ctrl + 2 * b + 4 * a } else { col };
        m[row * 8 + col] = c(1.0, 0.0);
    }
    m
}

/// Diagonal phase on the all-ones state of `k` qubits.
pub fn mat_diag_phase(theta: f64, k: usize) -> Vec<C> {
    let dim = 1usize << k;
    let mut m = vec![c(0.0, 0.0); dim * dim];
    for i in 0..dim {
        m[i * dim + i] = if i == dim - 1 {
            phase(theta)
        } else {
            c(1.0, 0.0)
        };
    }
    m
}

/// The reference matrix for a library gate.
pub fn oracle_matrix(gate: &Gate<f64>) -> Vec<C> {
    match gate {
        Gate::H => mat_h(),
        Gate::X => mat_x(),
        Gate::Phase(t) => mat_phase(*t),
        Gate::Cnot => mat_cnot(),
        Gate::Swap => mat_swap(),
        Gate::CSwap => mat_cswap(),
        Gate::CPhase(t) => mat_diag_phase(*t, 2),
        Gate::CcPhase(t) => mat_diag_phase(*t, 3),
        Gate::McPhase { angle, controls } => mat_diag_phase(*angle, controls + 1),
    }
}

// ── Embedding and dense linear algebra ──────────────────────────────────

/// Lift a k-qubit gate matrix to the full register:
/// U[i][j] = G[g(i)][g(j)] when i and j agree outside the targets, else 0,
/// where g(x) packs the target bits of x in target order.
pub fn embed(gate: &[C], targets: &[usize], n: usize) -> Vec<C> {
    let dim = 1usize << n;
    let k = targets.len();
    let gdim = 1usize << k;
    assert_eq!(gate.len(), gdim * gdim);
    let target_mask: usize = targets.iter().fold(0, |m, &t| m | (1 << t));
    let local = |x: usize| -> usize {
        let mut v = 0usize;
        for (b, &t) in targets.iter().enumerate() {
            if x & (1 << t) != 0 {
                v |= 1 << b;
            }
        }
        v
    };
    let mut full = vec![c(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            if (i & !target_mask) == (j & !target_mask) {
                full[i * dim + j] = gate[local(i) * gdim + local(j)];
            }
        }
    }
    full
}

pub fn matvec(m: &[C], v: &[C]) -> Vec<C> {
    let dim = v.len();
    assert_eq!(m.len(), dim * dim);
    (0..dim)
        .map(|r| (0..dim).map(|k| m[r * dim + k] * v[k]).sum())
        .collect()
}

pub fn matmul(a: &[C], b: &[C], dim: usize) -> Vec<C> {
    let mut out = vec![c(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for k in 0..dim {
            let ark = a[r * dim + k];
            if ark.norm_sqr() == 0.0 {
                continue;
            }
            for col in 0..dim {
                out[r * dim + col] += ark * b[k * dim + col];
            }
        }
    }
    out
}

pub fn identity(dim: usize) -> Vec<C> {
    let mut m = vec![c(0.0, 0.0); dim * dim];
    for i in 0..dim {
        m[i * dim + i] = c(1.0, 0.0);
    }
    m
}

/// Apply one bound gate to raw amplitudes via the embedded full matrix.
pub fn oracle_apply_op(amps: &[C], op: &GateOp<f64>, n: usize) -> Vec<C> {
    let full = embed(&oracle_matrix(&op.gate), &op.targets, n);
    matvec(&full, amps)
}

/// Run a circuit from |0…0⟩ through the reference engine.
pub fn oracle_run(n: usize, ops: &[GateOp<f64>]) -> Vec<C> {
    let mut amps = vec![c(0.0, 0.0); 1 << n];
    amps[0] = c(1.0, 0.0);
    for op in ops {
        amps = oracle_apply_op(&amps, op, n);
    }
    amps
}

/// Full circuit unitary (product of embedded gate matrices).
pub fn oracle_circuit_matrix(n: usize, ops: &[GateOp<f64>]) -> Vec<C> {
    let dim = 1usize << n;
    let mut u = identity(dim);
    for op in ops {
        let full = embed(&oracle_matrix(&op.gate), &op.targets, n);
        u = matmul(&full, &u, dim);
    }
    u
}

pub fn max_deviation(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Mean ± 3σ binomial check helper.
pub fn within_3_sigma(observed_freq: f64, expected_p: f64, trials: u64) -> bool {
    let sigma = (expected_p * (1.0 - expected_p) / trials as f64)
        .sqrt()
        .max(1.0 / trials as f64);
    (observed_freq - expected_p).abs() < 3.0 * sigma
}
