//! Projective measurement in the block verification basis.
//!
//! The verification basis for a phase Θ is the orthonormal set
//! {|+_Θ⟩, |−_Θ⟩, |01⟩, |10⟩} on a qubit pair, where
//! |±_Θ⟩ = (|00⟩ ± e^{iΘ}|11⟩)/√2. The honest block state is exactly
//! |+_Θ⟩; the two computational leak outcomes flag population outside the
//! Bell support and are treated as verification failures.

use rand::Rng;

use crate::error::Result;
use crate::scalar::{c_zero, phase_factor, Amplitude, Scalar};
use crate::sim::state::StateVector;

/// Outcome labels for the verification measurement, in sampling order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockBasisOutcome {
    /// |+_Θ⟩ — the honest outcome; verification passes.
    Plus,
    /// |−_Θ⟩ — wrong relative phase.
    Minus,
    /// |01⟩ — first (class A) qubit 0, second (class B) qubit 1.
    Leak01,
    /// |10⟩.
    Leak10,
}

impl BlockBasisOutcome {
    pub const ALL: [BlockBasisOutcome; 4] = [
        BlockBasisOutcome::Plus,
        BlockBasisOutcome::Minus,
        BlockBasisOutcome::Leak01,
        BlockBasisOutcome::Leak10,
    ];
}

/// The four basis vectors in the local 2-qubit space of (q_a, q_b).
/// Local index = bit(q_a) + 2·bit(q_b).
fn basis_vectors<S: Scalar>(theta: S) -> [[Amplitude<S>; 4]; 4] {
    let h = S::one() / S::SQRT_2();
    let ph = phase_factor(theta).scale(h);
    let zero = c_zero::<S>();
    let hh = Amplitude::new(h, S::zero());
    let one = Amplitude::new(S::one(), S::zero());
    [
        [hh, zero, zero, ph],    // plus
        [hh, zero, zero, -ph],   // minus
        [zero, zero, one, zero], // |01⟩: q_a = 0, q_b = 1
        [zero, one, zero, zero], // |10⟩
    ]
}

/// Exact Born probabilities of the four outcomes without collapsing.
pub fn block_basis_probabilities<S: Scalar>(
    state: &StateVector<S>,
    q_a: usize,
    q_b: usize,
    theta: S,
) -> Result<[S; 4]> {
    let ctx = ProjectionContext::prepare(state, q_a, q_b, theta)?;
    Ok(ctx.probabilities)
}

/// Projective measurement of (q_a, q_b) in the verification basis for Θ.
/// Collapses the register in place and returns the sampled outcome.
pub fn measure_in_block_basis<S: Scalar, R: Rng + ?Sized>(
    state: &mut StateVector<S>,
    q_a: usize,
    q_b: usize,
    theta: S,
    rng: &mut R,
) -> Result<BlockBasisOutcome> {
    let ctx = ProjectionContext::prepare(state, q_a, q_b, theta)?;
    let u: f64 = rng.gen();
    let mut acc = 0.0f64;
    // Rounding can leave Σp a hair under u; fall back to the most likely
    // outcome rather than an arbitrary (possibly zero-probability) one.
    let mut choice = None;
    for (k, p) in ctx.probabilities.iter().enumerate() {
        acc += p.to_f64_lossy();
        if u < acc {
            choice = Some(k);
            break;
        }
    }
    let choice = choice.unwrap_or_else(|| {
        (0..4)
            .max_by(|&a, &b| {
                ctx.probabilities[a]
                    .partial_cmp(&ctx.probabilities[b])
                    .unwrap()
            })
            .unwrap()
    });
    ctx.collapse(state, choice);
    Ok(BlockBasisOutcome::ALL[choice])
}

/// Precomputed projection coefficients c_k(r) = ⟨basis_k ⊗ r|ψ⟩ for every
/// assignment r of the spectator qubits.
struct ProjectionContext<S: Scalar> {
    basis: [[Amplitude<S>; 4]; 4],
    coeffs: [Vec<Amplitude<S>>; 4],
    probabilities: [S; 4],
    local_indices: [usize; 4],
    rest_indices: Vec<usize>,
}

impl<S: Scalar> ProjectionContext<S> {
    fn prepare(state: &StateVector<S>, q_a: usize, q_b: usize, theta: S) -> Result<Self> {
        // Reuse the gate-target validation for range/duplicate checks.
        crate::sim::gate::Gate::<S>::Swap.check_targets(&[q_a, q_b], state.n_qubits())?;
        let basis = basis_vectors(theta);
        let n = state.n_qubits();
        let mask_a = 1usize << q_a;
        let mask_b = 1usize << q_b;
        let pair_mask = mask_a | mask_b;

        // Global index offsets of the four local basis states.
        let local_indices = [0, mask_a, mask_b, mask_a | mask_b];

        let rest_indices: Vec<usize> = (0..1usize << n).filter(|i| i & pair_mask == 0).collect();

        let mut coeffs: [Vec<Amplitude<S>>; 4] = [vec![], vec![], vec![], vec![]];
        let mut probabilities = [S::zero(); 4];
        for (k, basis_k) in basis.iter().enumerate() {
            let mut c = Vec::with_capacity(rest_indices.len());
            for &r in &rest_indices {
                let mut acc = c_zero::<S>();
                for (l, &off) in local_indices.iter().enumerate() {
                    acc += basis_k[l].conj() * state.amplitudes()[r | off];
                }
                probabilities[k] += acc.norm_sqr();
                c.push(acc);
            }
            coeffs[k] = c;
        }
        Ok(Self {
            basis,
            coeffs,
            probabilities,
            local_indices,
            rest_indices,
        })
    }

    fn collapse(&self, state: &mut StateVector<S>, outcome: usize) {
        let p = self.probabilities[outcome];
        let scale = S::one() / p.sqrt();
        let mut amplitudes = vec![c_zero::<S>(); state.amplitudes().len()];
        for (ri, &r) in self.rest_indices.iter().enumerate() {
            let c = self.coeffs[outcome][ri].scale(scale);
            for (l, &off) in self.local_indices.iter().enumerate() {
                amplitudes[r | off] = self.basis[outcome][l] * c;
            }
        }
        *state = StateVector::from_amplitudes(amplitudes)
            .expect("projective collapse preserves normalization");
    }
}
