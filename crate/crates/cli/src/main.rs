//! `qnft` — deterministic runner for the quantum NFT blockchain simulator.
//!
//! Exit codes: 0 success, 2 configuration error, 3 protocol abort under
//! --strict, 4 internal invariant breach.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use commands::{AttackKind, MitmModeArg, Outcome, RunContext};
use config::GenesisConfig;
use qnft_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qnft",
    version,
    about = "Simulate a quantum NFT blockchain: mint and verify phase-encoded blocks over \
             proof-of-stake rounds, run attack scenarios, and reconstruct chain states by \
             Pauli tomography"
)]
struct Cli {
    /// Configuration document (JSON); the built-in two-block preset when
    /// omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; every command is deterministic under it. Required when
    /// the CI environment variable is set, defaults to 0 otherwise.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Shots per tomography setting (overrides the config).
    #[arg(long, global = true)]
    shots: Option<u64>,

    /// Per-gate depolarizing probability (overrides the config).
    #[arg(long, global = true)]
    noise: Option<f64>,

    /// Number of rounds (overrides the config round list length).
    #[arg(long, global = true)]
    rounds: Option<u64>,

    /// Output directory for reports, logs, and plot data.
    #[arg(long, global = true, default_value = "qnft_out")]
    out: PathBuf,

    /// Exit with code 3 when any round aborts.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured mint rounds end to end, then tomograph and
    /// export the final chain state.
    Demo,
    /// Extend the persisted chain by more consensus rounds.
    Mint,
    /// Run an attack scenario against the verification rule.
    Attack {
        #[arg(value_enum)]
        kind: AttackKind,
        /// Fixed phase offset for intercept-resend (uniform guessing when
        /// omitted).
        #[arg(long)]
        offset: Option<f64>,
        /// Man-in-the-middle capability.
        #[arg(long, value_enum)]
        mode: Option<MitmModeArg>,
    },
    /// Tomograph the current chain (persisted log, or the configured
    /// rounds realized directly).
    Tomo,
    /// Locate the depolarizing strength that reproduces a target fidelity.
    Calibrate {
        /// Target reconstructed fidelity.
        #[arg(long, default_value_t = 0.80)]
        target: f64,
    },
}

fn resolve_seed(flag: Option<u64>, config: &GenesisConfig) -> Result<u64> {
    if let Some(seed) = flag.or(config.seed) {
        return Ok(seed);
    }
    let ci = std::env::var("CI").map(|v| !v.is_empty()).unwrap_or(false);
    if ci {
        return Err(Error::Config(
            "seed: --seed is mandatory in CI mode (CI environment variable is set)".into(),
        ));
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<Outcome> {
    let mut config = match &cli.config {
        Some(path) => GenesisConfig::load(path)?,
        None => GenesisConfig::two_block_preset(),
    };
    if let Some(noise) = cli.noise {
        if !(0.0..=1.0).contains(&noise) {
            return Err(Error::Config(format!(
                "noise: must be in [0, 1], got {noise}"
            )));
        }
        config.noise = Some(noise);
    }
    let seed = resolve_seed(cli.seed, &config)?;
    let shots = cli.shots.unwrap_or(config.shots);
    if shots == 0 {
        return Err(Error::Config("shots: must be ≥ 1".into()));
    }
    let ctx = RunContext {
        config,
        seed,
        out_dir: cli.out.clone(),
    };
    match cli.command {
        Command::Demo => commands::cmd_demo(&ctx, cli.rounds.map(|r| r as usize), shots),
        Command::Mint => {
            let rounds = cli.rounds.unwrap_or(1) as usize;
            commands::cmd_mint(&ctx, rounds)
        }
        Command::Attack { kind, offset, mode } => {
            let rounds = cli.rounds.unwrap_or(1000);
            commands::cmd_attack(&ctx, kind, rounds, offset, mode, shots)
        }
        Command::Tomo => commands::cmd_tomo(&ctx, shots),
        Command::Calibrate { target } => commands::cmd_calibrate(&ctx, target, shots),
    }
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        // User-addressable: bad configuration, inputs, or requests the
        // current chain cannot satisfy.
        Error::Config(_)
        | Error::Constraint(_)
        | Error::Codec(_)
        | Error::Capacity(_)
        | Error::Policy(_)
        | Error::Parameter(_)
        | Error::Tomography(_)
        | Error::Calibration(_)
        | Error::Consensus(_)
        | Error::ChainLog(_)
        | Error::Io(_) => 2,
        // Anything else inside a CLI flow means a broken invariant.
        _ => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = cli.strict;
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Aborted) => {
            if strict {
                eprintln!("qnft: round aborted (strict mode)");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(error) => {
            eprintln!("qnft: {error}");
            ExitCode::from(exit_code_for(&error))
        }
    }
}
