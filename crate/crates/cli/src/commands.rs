//! Subcommand implementations. Every command is deterministic under a
//! fixed seed and writes its artifacts under the output directory with
//! stable names.

use std::path::{Path, PathBuf};

use qnft_core::codec::{self, InfoPayload, Token};
use qnft_core::ledger::{
    append_chain_log, init_chain_log, read_chain_log, replay_chain, Block, ChainState,
};
use qnft_core::protocol::{
    attack_entangle_measure, attack_intercept_resend, attack_mitm, EveUnitary, GuessStrategy,
    MitmMode, Network,
};
use qnft_core::report::RoundReport;
use qnft_core::tomography::{
    calibrate_noise_to_fidelity, export_city, export_hinton, run_chain_tomography,
};
use qnft_core::{master_rng, Error, Result, SimRng};
use rand::Rng;

use crate::config::GenesisConfig;

pub const CHAIN_LOG_FILE: &str = "chain_log.jsonl";
pub const ROUND_REPORTS_FILE: &str = "round_reports.json";
pub const TOMOGRAPHY_REPORT_FILE: &str = "tomography_report.json";
pub const CITY_PLOT_FILE: &str = "city_plot.json";
pub const HINTON_PLOT_FILE: &str = "hinton_plot.json";
pub const ATTACK_REPORT_FILE: &str = "attack_report.json";
pub const LEAK_REPORT_FILE: &str = "leak_report.json";
pub const CALIBRATION_REPORT_FILE: &str = "calibration_report.json";

/// How a command run ended; the process exit code follows from it.
pub enum Outcome {
    Success,
    /// At least one round aborted; exit 3 under --strict.
    Aborted,
}

pub struct RunContext {
    pub config: GenesisConfig,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl RunContext {
    pub fn prepare(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out_dir)?;
        Ok(())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn write_json<T: serde::Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value).expect("report serializes");
        std::fs::write(self.path(name), text)?;
        Ok(())
    }
}

fn random_owner_bits(len: usize, rng: &mut SimRng) -> String {
    (0..len)
        .map(|_| if rng.gen::<bool>() { '1' } else { '0' })
        .collect()
}

/// Run consensus rounds against the network, appending committed blocks to
/// the chain log.
fn run_rounds(
    ctx: &RunContext,
    net: &mut Network,
    n_rounds: usize,
    first_round_index: usize,
    rng: &mut SimRng,
    log_path: &Path,
) -> Result<Vec<RoundReport>> {
    let mut reports = Vec::with_capacity(n_rounds);
    for i in 0..n_rounds {
        let spec_index = first_round_index + i;
        let (owner_bits, token_bits) = match ctx.config.rounds.get(spec_index) {
            Some(spec) => (spec.owner_bits.clone(), spec.token_bits.clone()),
            None => (random_owner_bits(ctx.config.encoding.info_len, rng), None),
        };
        let report = net.mint_round(&owner_bits, token_bits.as_deref(), rng)?;
        if report.committed {
            // All honest logs are identical; persist the first peer's view.
            let record = net.peers()[0]
                .records
                .last()
                .expect("committed round appends a record")
                .clone();
            append_chain_log(log_path, &record)?;
        }
        println!(
            "round {}: winner {} block {} θ_A {:.6} θ_B {:.6} → {}",
            report.round_id,
            report.winner,
            report.block_index,
            report.theta_a,
            report.theta_b,
            if report.committed {
                "committed"
            } else {
                "aborted"
            }
        );
        reports.push(report);
    }
    Ok(reports)
}

/// Tomograph the chain and write the report plus the plot data files.
fn tomography_outputs(ctx: &RunContext, chain: &ChainState, shots: u64) -> Result<Option<f64>> {
    if chain.is_empty() {
        println!("tomography skipped: empty chain");
        return Ok(None);
    }
    if 2 * chain.len() > qnft_core::tomography::MAX_TOMOGRAPHY_QUBITS {
        println!(
            "tomography skipped: chain has {} blocks, jobs cap at {} qubits",
            chain.len(),
            qnft_core::tomography::MAX_TOMOGRAPHY_QUBITS
        );
        return Ok(None);
    }
    let noise = ctx.config.noise.unwrap_or(0.0);
    let (recon, report) = run_chain_tomography(chain.blocks(), shots, noise, ctx.seed)?;
    ctx.write_json(TOMOGRAPHY_REPORT_FILE, &report)?;
    ctx.write_json(CITY_PLOT_FILE, &export_city(&recon.rho))?;
    ctx.write_json(HINTON_PLOT_FILE, &export_hinton(&recon.rho))?;
    println!(
        "tomography: {} settings × {} shots, noise p = {}, fidelity vs ideal = {:.6}",
        report.settings, report.shots_per_setting, report.noise_p, report.fidelity_vs_ideal
    );
    Ok(Some(report.fidelity_vs_ideal))
}

/// `demo`: a fresh chain, the configured rounds end to end, tomography of
/// the final state, and the plot exports.
pub fn cmd_demo(ctx: &RunContext, rounds_override: Option<usize>, shots: u64) -> Result<Outcome> {
    ctx.prepare()?;
    let mut net = ctx.config.build_network()?;
    let log_path = ctx.path(CHAIN_LOG_FILE);
    init_chain_log(&log_path, &ctx.config.encoding)?;

    let n_rounds = rounds_override.unwrap_or(ctx.config.rounds.len());
    let mut rng = master_rng(ctx.seed);
    let reports = run_rounds(ctx, &mut net, n_rounds, 0, &mut rng, &log_path)?;
    ctx.write_json(ROUND_REPORTS_FILE, &reports)?;

    tomography_outputs(ctx, &net.peers()[0].chain, shots)?;
    let aborted = reports.iter().any(|r| !r.committed);
    println!(
        "demo: {} of {} rounds committed; artifacts in {}",
        reports.iter().filter(|r| r.committed).count(),
        reports.len(),
        ctx.out_dir.display()
    );
    Ok(if aborted {
        Outcome::Aborted
    } else {
        Outcome::Success
    })
}

/// `mint`: extend the persisted chain by more rounds.
pub fn cmd_mint(ctx: &RunContext, rounds: usize) -> Result<Outcome> {
    ctx.prepare()?;
    let log_path = ctx.path(CHAIN_LOG_FILE);
    let mut net = ctx.config.build_network()?;
    let existing = if log_path.exists() {
        let (encoding, records) = read_chain_log(&log_path)?;
        if encoding != ctx.config.encoding {
            return Err(Error::Config(
                "encoding: config does not match the persisted chain log".into(),
            ));
        }
        let chain = replay_chain(encoding, &records)?;
        net.restore_chains(&chain, &records)?;
        records.len()
    } else {
        init_chain_log(&log_path, &ctx.config.encoding)?;
        0
    };

    let mut rng = master_rng(ctx.seed);
    let reports = run_rounds(ctx, &mut net, rounds, existing, &mut rng, &log_path)?;
    ctx.write_json(ROUND_REPORTS_FILE, &reports)?;
    let aborted = reports.iter().any(|r| !r.committed);
    println!("mint: chain now has {} blocks", net.peers()[0].chain.len());
    Ok(if aborted {
        Outcome::Aborted
    } else {
        Outcome::Success
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AttackKind {
    InterceptResend,
    EntangleMeasure,
    Mitm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MitmModeArg {
    WithoutSecret,
    WithSecret,
    Passive,
}

/// `attack`: run one of the three adversaries and write its statistics.
pub fn cmd_attack(
    ctx: &RunContext,
    kind: AttackKind,
    rounds: u64,
    offset: Option<f64>,
    mode: Option<MitmModeArg>,
    shots: u64,
) -> Result<Outcome> {
    ctx.prepare()?;
    let net = ctx.config.build_network()?;
    match kind {
        AttackKind::InterceptResend => {
            let strategy = match offset {
                Some(delta) => GuessStrategy::FixedOffset(delta),
                None => GuessStrategy::UniformPhase,
            };
            let stats = attack_intercept_resend(&net, rounds, strategy, ctx.seed)?;
            println!(
                "intercept-resend ({:?}): detection rate {:.4} over {} rounds (per-peer pass {:.4}, expected {:?})",
                strategy, stats.detection_rate, stats.rounds, stats.peer_pass_rate,
                stats.expected_peer_pass_rate
            );
            ctx.write_json(ATTACK_REPORT_FILE, &stats)?;
        }
        AttackKind::Mitm => {
            let mode = match mode.unwrap_or(MitmModeArg::WithSecret) {
                MitmModeArg::WithoutSecret => MitmMode::WithoutSecret,
                MitmModeArg::WithSecret => MitmMode::WithSecretUniformForge,
                MitmModeArg::Passive => MitmMode::PassiveRelay,
            };
            let stats = attack_mitm(&net, rounds, mode, ctx.seed)?;
            println!(
                "man-in-the-middle ({mode:?}): detection rate {:.4} over {} rounds, {} copies intercepted",
                stats.detection_rate, stats.rounds, stats.copies_intercepted
            );
            ctx.write_json(ATTACK_REPORT_FILE, &stats)?;
        }
        AttackKind::EntangleMeasure => {
            // The branch-copying attack: ancilla follows the Bell branch.
            let eve = EveUnitary::from_amplitudes(
                qnft_core::Amplitude::new(1.0, 0.0),
                qnft_core::Amplitude::new(0.0, 0.0),
                qnft_core::Amplitude::new(0.0, 0.0),
                qnft_core::Amplitude::new(1.0, 0.0),
            )?;
            let thetas = [
                std::f64::consts::PI / 16.0,
                std::f64::consts::FRAC_PI_4,
                3.0 * std::f64::consts::FRAC_PI_4,
            ];
            let report = attack_entangle_measure(&eve, &thetas, shots, ctx.seed)?;
            println!(
                "entangle-measure: ancilla deviation {:.2e} across probe phases, sampled TV {:.4}, swap-test P(0) vs honest {:.4}",
                report.max_analytic_deviation,
                report.max_sampled_tv_distance,
                report.swap_test_p0_vs_honest
            );
            ctx.write_json(LEAK_REPORT_FILE, &report)?;
        }
    }
    Ok(Outcome::Success)
}

/// The chain a read-only command works on: the persisted log when present,
/// otherwise the configured rounds realized directly.
fn current_chain(ctx: &RunContext) -> Result<ChainState> {
    let log_path = ctx.path(CHAIN_LOG_FILE);
    if log_path.exists() {
        let (encoding, records) = read_chain_log(&log_path)?;
        return replay_chain(encoding, &records);
    }
    let mut chain = ChainState::new(ctx.config.encoding.clone());
    let mut rng = master_rng(ctx.seed);
    for (i, spec) in ctx.config.rounds.iter().enumerate() {
        let info = InfoPayload::new(spec.owner_bits.clone(), i + 1);
        let token = match &spec.token_bits {
            Some(bits) => Token::from_bits(bits.clone(), &ctx.config.encoding)?,
            None => codec::generate_token(&ctx.config.encoding, &mut rng)?,
        };
        chain.append_block(Block::derive(info, token, &ctx.config.encoding)?)?;
    }
    Ok(chain)
}

/// `tomo`: tomography of the current chain.
pub fn cmd_tomo(ctx: &RunContext, shots: u64) -> Result<Outcome> {
    ctx.prepare()?;
    let chain = current_chain(ctx)?;
    if chain.is_empty() {
        return Err(Error::Config(
            "rounds: no blocks to tomograph; run demo/mint first or configure rounds".into(),
        ));
    }
    tomography_outputs(ctx, &chain, shots)?;
    Ok(Outcome::Success)
}

/// `calibrate`: locate the depolarizing strength reproducing a target
/// fidelity on the current chain.
pub fn cmd_calibrate(ctx: &RunContext, target: f64, shots: u64) -> Result<Outcome> {
    ctx.prepare()?;
    let chain = current_chain(ctx)?;
    if chain.is_empty() {
        return Err(Error::Config(
            "rounds: no blocks to calibrate against".into(),
        ));
    }
    let seeds: Vec<u64> = (0..5).map(|k| ctx.seed.wrapping_add(k)).collect();
    let report = calibrate_noise_to_fidelity(target, chain.blocks(), shots, &seeds)?;
    println!(
        "calibrate: p* = {:.6} gives fidelity {:.4} (target {target}) over seeds {:?}",
        report.p_star, report.achieved_fidelity, seeds
    );
    ctx.write_json(CALIBRATION_REPORT_FILE, &report)?;
    Ok(Outcome::Success)
}
