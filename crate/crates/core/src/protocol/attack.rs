//! Channel adversaries and the attack harness.
//!
//! Each harness runs attack rounds against an independently cloned network
//! with a per-round derived generator, so round outcomes are independent
//! samples and reproducible under the master seed.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::ledger::create_block_state;
use crate::report::{AncillaRecord, DetectionStats, LeakReport};
use crate::rng::derived_rng;
use crate::scalar::c_zero;
use crate::sim::{DensityMatrix, Gate, StateVector};

use super::{swap_test, Adversary, Network};

/// How an intercept-and-resend adversary guesses the block phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GuessStrategy {
    /// The lucky guess: forge with the true phase.
    ExactPhase,
    /// Forge with truth + δ.
    FixedOffset(f64),
    /// One uniform draw from [0, 2π) per round.
    UniformPhase,
}

impl GuessStrategy {
    /// Closed-form per-peer pass probability, when one exists.
    pub fn expected_pass_rate(&self) -> Option<f64> {
        match self {
            GuessStrategy::ExactPhase => Some(1.0),
            GuessStrategy::FixedOffset(delta) => Some((delta / 2.0).cos().powi(2)),
            // (1/2π)∫ cos²(δ/2) dδ = 1/2.
            GuessStrategy::UniformPhase => Some(0.5),
        }
    }
}

/// Man-in-the-middle variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MitmMode {
    /// Substitutes state and message but cannot produce the genesis tag.
    WithoutSecret,
    /// Holds the tag; forges the quantum state with a uniform phase.
    WithSecretUniformForge,
    /// Relays everything untouched and measures nothing.
    PassiveRelay,
}

/// The entangle-and-measure unitary, completed from the four amplitudes
/// that define its action on the honest Bell support:
///
/// U|0⟩_E|00⟩ = a|0⟩_E|00⟩ + c|1⟩_E|00⟩
/// U|0⟩_E|11⟩ = b|0⟩_E|11⟩ + d|1⟩_E|11⟩
///
/// The phase e^{iΘ} rides along on the |11⟩ branch. Valid parameters need
/// |a|² + |c|² = 1 and |b|² + |d|² = 1; the remaining columns are the
/// canonical orthonormal completion.
#[derive(Debug, Clone)]
pub struct EveUnitary {
    amplitudes: [Complex64; 4],
    matrix: Vec<Complex64>,
}

impl EveUnitary {
    pub fn from_amplitudes(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let ac = a.norm_sqr() + c.norm_sqr();
        let bd = b.norm_sqr() + d.norm_sqr();
        if (ac - 1.0).abs() > 1e-9 || (bd - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(format!(
                "amplitudes do not extend to a unitary: |a|²+|c|² = {ac}, |b|²+|d|² = {bd}"
            )));
        }
        // 8×8 on (block A = bit 0, block B = bit 1, ancilla = bit 2).
        // Column = input basis state, row = output component.
        let dim = 8usize;
        let mut matrix = vec![c_zero::<f64>(); dim * dim];
        let mut set_col = |col: usize, entries: &[(usize, Complex64)]| {
            for &(row, v) in entries {
                matrix[row * dim + col] = v;
            }
        };
        set_col(0, &[(0, a), (4, c)]); // |anc 0, block 00⟩
        set_col(3, &[(3, b), (7, d)]); // |anc 0, block 11⟩
        set_col(4, &[(0, -c.conj()), (4, a.conj())]); // completion of the {e0,e4} plane
        set_col(7, &[(3, -d.conj()), (7, b.conj())]); // completion of the {e3,e7} plane
        for untouched in [1usize, 2, 5, 6] {
            set_col(untouched, &[(untouched, Complex64::new(1.0, 0.0))]);
        }
        Ok(Self {
            amplitudes: [a, b, c, d],
            matrix,
        })
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amplitudes
    }
}

fn collect_stats(
    attack: &str,
    base: &Network,
    rounds: u64,
    seed: u64,
    expected_peer_pass_rate: Option<f64>,
    intercepts_per_round: u64,
) -> Result<DetectionStats> {
    let mut detections = 0u64;
    let mut peer_trials = 0u64;
    let mut peer_passes = 0u64;
    for round in 0..rounds {
        let mut net = base.clone();
        let mut rng = derived_rng(seed, round);
        // Owner bits vary per round, drawn from the round generator.
        let bits: String = (0..net.encoding.info_len)
            .map(|_| if rng.gen::<bool>() { '1' } else { '0' })
            .collect();
        let report = net.mint_round(&bits, None, &mut rng)?;
        if !report.committed {
            detections += 1;
        }
        for verdict in report.verdicts.values() {
            peer_trials += 1;
            if verdict.passed() {
                peer_passes += 1;
            }
        }
    }
    Ok(DetectionStats {
        attack: attack.to_string(),
        rounds,
        detections,
        detection_rate: detections as f64 / rounds as f64,
        peer_trials,
        peer_passes,
        peer_pass_rate: peer_passes as f64 / peer_trials.max(1) as f64,
        expected_peer_pass_rate,
        copies_intercepted: rounds * intercepts_per_round,
    })
}

/// Intercept-and-resend: the adversary replaces every copy with a forged
/// Bell-phase state from its guess.
pub fn attack_intercept_resend(
    network: &Network,
    rounds: u64,
    strategy: GuessStrategy,
    seed: u64,
) -> Result<DetectionStats> {
    if rounds == 0 {
        return Err(Error::Parameter("attack needs at least one round".into()));
    }
    let mut base = network.clone();
    let n_peers = base.peers().len() as u64;
    base.set_all_channels(Adversary::InterceptResend(strategy));
    collect_stats(
        "intercept_resend",
        &base,
        rounds,
        seed,
        strategy.expected_pass_rate(),
        n_peers,
    )
}

/// Man-in-the-middle with the chosen capability.
pub fn attack_mitm(
    network: &Network,
    rounds: u64,
    mode: MitmMode,
    seed: u64,
) -> Result<DetectionStats> {
    if rounds == 0 {
        return Err(Error::Parameter("attack needs at least one round".into()));
    }
    let mut base = network.clone();
    let n_peers = base.peers().len() as u64;
    base.set_all_channels(Adversary::Mitm(mode));
    let (expected, intercepts) = match mode {
        MitmMode::WithoutSecret => (Some(0.0), n_peers),
        MitmMode::WithSecretUniformForge => (Some(0.5), n_peers),
        MitmMode::PassiveRelay => (Some(1.0), 0),
    };
    collect_stats(
        "man_in_the_middle",
        &base,
        rounds,
        seed,
        expected,
        intercepts,
    )
}

/// Entangle-and-measure futility probe: apply the attack at each phase in
/// `theta_set` and report the ancilla statistics. All information about Θ
/// sits on the |11⟩ branch modulus-free, so the ancilla marginal — and
/// every measurement of it — is Θ-independent.
pub fn attack_entangle_measure(
    eve: &EveUnitary,
    theta_set: &[f64],
    shots: u64,
    seed: u64,
) -> Result<LeakReport> {
    if theta_set.is_empty() {
        return Err(Error::Parameter("theta_set must be non-empty".into()));
    }
    let mut records = Vec::with_capacity(theta_set.len());
    let mut reduced: Vec<DensityMatrix<f64>> = Vec::with_capacity(theta_set.len());
    for (i, &theta) in theta_set.iter().enumerate() {
        let mut rng = derived_rng(seed, i as u64);
        let attacked = attacked_state(eve, theta)?;
        let rho = DensityMatrix::from_state(&attacked)?;
        let rho_anc = rho.partial_trace(&[2])?;

        let z_p1 = attacked.prob_one(2)?;
        let x_p1 = {
            let mut rotated = attacked.clone();
            rotated.apply(Gate::H, &[2])?;
            rotated.prob_one(2)?
        };
        let sample = |p: f64, rng: &mut crate::rng::SimRng| -> f64 {
            let mut ones = 0u64;
            for _ in 0..shots {
                if rng.gen::<f64>() < p {
                    ones += 1;
                }
            }
            ones as f64 / shots.max(1) as f64
        };
        let z_f1 = sample(z_p1, &mut rng);
        let x_f1 = sample(x_p1, &mut rng);
        records.push(AncillaRecord {
            theta,
            reduced_density: rho_anc.entries().iter().map(|e| (e.re, e.im)).collect(),
            z_one_probability: z_p1,
            z_one_frequency: z_f1,
            x_one_probability: x_p1,
            x_one_frequency: x_f1,
            shots,
        });
        reduced.push(rho_anc);
    }

    let mut max_analytic = 0.0f64;
    let mut max_tv = 0.0f64;
    for i in 0..reduced.len() {
        for j in (i + 1)..reduced.len() {
            for (a, b) in reduced[i].entries().iter().zip(reduced[j].entries()) {
                max_analytic = max_analytic.max((a - b).norm());
            }
            max_tv = max_tv
                .max((records[i].z_one_frequency - records[j].z_one_frequency).abs())
                .max((records[i].x_one_frequency - records[j].x_one_frequency).abs());
        }
    }

    // Tamper evidence: an attacked copy never swap-tests clean against an
    // honest one unless the attack is trivial on the ancilla-0 branch.
    let mut rng = derived_rng(seed, theta_set.len() as u64);
    let honest = create_block_state(theta_set[0], 0.0)?;
    let attacked = attacked_state(eve, theta_set[0])?;
    let swap = swap_test(&attacked, &honest, 2, 0, &mut rng)?;

    Ok(LeakReport {
        amplitudes: eve.amplitudes.iter().map(|a| (a.re, a.im)).collect(),
        records,
        max_analytic_deviation: max_analytic,
        max_sampled_tv_distance: max_tv,
        swap_test_p0_vs_honest: swap.analytic_p0,
    })
}

fn attacked_state(eve: &EveUnitary, theta: f64) -> Result<StateVector<f64>> {
    let block = create_block_state(theta, 0.0)?;
    let ancilla = StateVector::new(1)?;
    let mut joint = block.tensor(&ancilla)?;
    joint.apply_dense_unitary(&eve.matrix, &[0, 1, 2])?;
    Ok(joint)
}
