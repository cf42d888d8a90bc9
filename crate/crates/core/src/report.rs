//! Serializable run artifacts: round reports, attack detection statistics,
//! leak reports, swap-test results, tomography and calibration summaries.
//! Everything here serializes to the JSON documents the CLI writes; field
//! names are the published schema.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Per-peer verdict of a verification round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// Measured |−_Θ⟩: wrong relative phase.
    FailMinus,
    /// Measured a computational leak outcome.
    FailLeak01,
    FailLeak10,
    /// Classical message authentication tag mismatch.
    FailAuth,
    /// Disclosed phases violate the scaled-phase consistency rule.
    FailScaling,
}

impl Verdict {
    pub fn passed(self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "plus",
            Verdict::FailMinus => "minus",
            Verdict::FailLeak01 => "leak01",
            Verdict::FailLeak10 => "leak10",
            Verdict::FailAuth => "auth_reject",
            Verdict::FailScaling => "scaling_reject",
        }
    }
}

/// Outcome of one mint → verify → integrate round.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundReport {
    pub round_id: u64,
    pub winner: String,
    pub block_index: usize,
    /// Disclosed phases (θ_mA, θ_mB).
    pub theta_a: f64,
    pub theta_b: f64,
    /// Peer id → verdict, every peer that verified.
    pub verdicts: BTreeMap<String, Verdict>,
    pub committed: bool,
    pub abort_reason: Option<String>,
    /// Fresh block-state preparations made by the minter; the
    /// no-duplication audit requires exactly one per peer.
    pub preparations: usize,
    pub validator_rewarded: bool,
    pub validator_slashed: bool,
}

/// Aggregated attack statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionStats {
    pub attack: String,
    pub rounds: u64,
    /// Rounds that ended in an abort.
    pub detections: u64,
    pub detection_rate: f64,
    /// Pooled per-peer verification trials and passes.
    pub peer_trials: u64,
    pub peer_passes: u64,
    pub peer_pass_rate: f64,
    /// Closed-form per-peer pass probability for the strategy, when one
    /// exists.
    pub expected_peer_pass_rate: Option<f64>,
    /// Quantum copies the adversary intercepted and discarded or replaced;
    /// zero for a passive relay, which gains nothing.
    pub copies_intercepted: u64,
}

/// Ancilla statistics of an entangle-and-measure attack at one probe phase.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AncillaRecord {
    pub theta: f64,
    /// Exact ancilla reduced density matrix, row-major (re, im) pairs.
    pub reduced_density: Vec<(f64, f64)>,
    /// Exact and sampled outcome-1 probabilities per measurement basis.
    pub z_one_probability: f64,
    pub z_one_frequency: f64,
    pub x_one_probability: f64,
    pub x_one_frequency: f64,
    pub shots: u64,
}

/// What an entangle-and-measure adversary learned: nothing, and the report
/// shows it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LeakReport {
    /// The (a, b, c, d) amplitudes defining the attack unitary.
    pub amplitudes: Vec<(f64, f64)>,
    pub records: Vec<AncillaRecord>,
    /// Max entrywise deviation between the exact ancilla reduced states
    /// across probe phases.
    pub max_analytic_deviation: f64,
    /// Max total-variation distance between sampled ancilla distributions
    /// across probe phases (Z and X bases).
    pub max_sampled_tv_distance: f64,
    /// Swap-test P(0) of an attacked copy against an honest copy.
    pub swap_test_p0_vs_honest: f64,
}

/// Swap-test estimate between two registers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SwapTestResult {
    pub swapped_qubits: usize,
    pub shots: u64,
    /// Circuit-exact P(ancilla = 0).
    pub analytic_p0: f64,
    /// Monte-Carlo estimate at `shots`.
    pub sampled_p0: f64,
}

/// One tomography job summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TomographyReport {
    pub n_qubits: usize,
    pub settings: usize,
    pub shots_per_setting: u64,
    pub noise_p: f64,
    pub seed: u64,
    pub fidelity_vs_ideal: f64,
}

/// Noise calibration summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub target_fidelity: f64,
    pub p_star: f64,
    pub achieved_fidelity: f64,
    pub shots_per_setting: u64,
    pub seeds: Vec<u64>,
    /// Bisection trace, (p, mean fidelity), in evaluation order.
    pub trace: Vec<(f64, f64)>,
}
