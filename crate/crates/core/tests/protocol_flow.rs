//! End-to-end consensus rounds, the verification detection law, swap-test
//! comparisons, the attack harness, and the transport audits.

mod common;

use common::*;
use num_complex::Complex64;
use qnft_core::codec::PhaseEncoding;
use qnft_core::consensus::PeerId;
use qnft_core::ledger::{Block, ChainState};
use qnft_core::protocol::{
    attack_entangle_measure, attack_intercept_resend, attack_mitm, compare_chains_swap_test,
    Adversary, EveUnitary, GuessStrategy, MitmMode, Network, NetworkConfig, PolicyConfig,
};
use qnft_core::rng::{derived_rng, master_rng};
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

fn network(n_peers: usize, scaled: bool) -> Network {
    Network::new(NetworkConfig {
        encoding: PhaseEncoding::default(),
        policy: PolicyConfig::default(),
        scaled_mode: scaled,
        peers: (0..n_peers)
            .map(|i| (PeerId::new(format!("p{i}")), 10.0))
            .collect(),
        initial_holding_ticks: 1,
        genesis_secret: 0x9f17,
    })
    .unwrap()
}

#[test]
fn hundred_honest_rounds_commit_with_identical_logs() {
    let mut commits = 0u32;
    for seed in 0..25u64 {
        let mut net = network(5, false);
        let mut rng = master_rng(seed);
        for _ in 0..4 {
            let report = net.mint_round("001", None, &mut rng).unwrap();
            assert!(report.committed, "honest round aborted at seed {seed}");
            assert_eq!(report.preparations, 5, "one preparation per peer");
            commits += 1;
        }
        // Chain logs byte-identical across peers.
        let logs: Vec<String> = net
            .peers()
            .iter()
            .map(|p| serde_json::to_string(&p.records).unwrap())
            .collect();
        assert!(logs.windows(2).all(|w| w[0] == w[1]));
        // And every register agrees with its replay.
        for peer in net.peers() {
            let register = peer.chain.register().unwrap();
            let replay = peer.chain.closed_form().unwrap().unwrap();
            assert_eq!(register.amplitudes(), replay.amplitudes());
        }
    }
    assert_eq!(commits, 100);
}

#[test]
fn phase_pi_adversary_always_aborts_and_slashes() {
    for seed in 0..20u64 {
        let mut net = network(5, false);
        net.set_all_channels(Adversary::InterceptResend(GuessStrategy::FixedOffset(PI)));
        let mut rng = master_rng(seed);
        let report = net.mint_round("001", None, &mut rng).unwrap();
        assert!(!report.committed, "seed {seed} committed under a π offset");
        assert!(report.validator_slashed);
        assert!(!report.validator_rewarded);
        assert!(report.verdicts.values().all(|v| !v.passed()));
        for peer in net.peers() {
            assert!(peer.chain.is_empty());
        }
    }
}

#[test]
fn detection_law_matches_cos_squared() {
    // Sampled single-peer pass frequency at δ ∈ {0, π/8, π/4, π/2, π}.
    let base = network(1, false);
    for (i, delta) in [0.0, PI / 8.0, FRAC_PI_4, FRAC_PI_2, PI].iter().enumerate() {
        let stats = attack_intercept_resend(
            &base,
            10_000,
            GuessStrategy::FixedOffset(*delta),
            40_000 + i as u64,
        )
        .unwrap();
        let expect = (delta / 2.0).cos().powi(2);
        assert!(
            within_3_sigma(stats.peer_pass_rate, expect, stats.peer_trials),
            "δ = {delta}: pass rate {} vs cos² {expect}",
            stats.peer_pass_rate
        );
    }
}

#[test]
fn uniform_guess_passes_half_the_time() {
    let base = network(1, false);
    let stats = attack_intercept_resend(&base, 10_000, GuessStrategy::UniformPhase, 51).unwrap();
    assert_eq!(stats.expected_peer_pass_rate, Some(0.5));
    assert!(
        within_3_sigma(stats.peer_pass_rate, 0.5, stats.peer_trials),
        "pass rate {}",
        stats.peer_pass_rate
    );
    assert_eq!(stats.copies_intercepted, 10_000);
}

#[test]
fn lucky_guess_is_undetectable() {
    let base = network(3, false);
    let stats = attack_intercept_resend(&base, 200, GuessStrategy::ExactPhase, 52).unwrap();
    assert_eq!(stats.detections, 0);
    assert_eq!(stats.peer_passes, stats.peer_trials);
}

#[test]
fn swap_test_formula_on_randomized_chain_pairs() {
    let mut rng = master_rng(8080);
    let shots = 10_000u64;
    for pair in 0..10u32 {
        let n_blocks = 1 + (pair as usize % 3);
        let mut phases_m = Vec::new();
        let mut phases_n = Vec::new();
        for _ in 0..n_blocks {
            let a: f64 = rng.gen::<f64>() * 0.3;
            let b: f64 = rng.gen::<f64>() * 0.3;
            phases_m.push((a, b));
            // Every other pair gets a perturbed copy; the rest are equal.
            if pair % 2 == 0 {
                phases_n.push((a, b));
            } else {
                phases_n.push((a + rng.gen::<f64>() * 0.4, b));
            }
        }
        let build = |phases: &[(f64, f64)]| {
            let mut chain = ChainState::new(PhaseEncoding::default());
            for (i, &(a, b)) in phases.iter().enumerate() {
                chain.append_block(Block::from_phases(i + 1, a, b)).unwrap();
            }
            chain
        };
        let chain_m = build(&phases_m);
        let chain_n = build(&phases_n);

        // Independent overlap oracle: raw complex dot product.
        let overlap: Complex64 = chain_m
            .register()
            .unwrap()
            .amplitudes()
            .iter()
            .zip(chain_n.register().unwrap().amplitudes())
            .map(|(x, y)| x.conj() * y)
            .sum();
        let expect_p0 = (1.0 + overlap.norm_sqr()) / 2.0;

        let mut test_rng = derived_rng(9090, pair as u64);
        let result = compare_chains_swap_test(&chain_m, &chain_n, shots, &mut test_rng).unwrap();
        assert!(
            (result.analytic_p0 - expect_p0).abs() < 1e-12,
            "pair {pair}: circuit P(0) {} vs overlap formula {expect_p0}",
            result.analytic_p0
        );
        assert!(
            within_3_sigma(result.sampled_p0, expect_p0, shots),
            "pair {pair}: sampled {} vs {expect_p0}",
            result.sampled_p0
        );
        if pair % 2 == 0 {
            assert!((result.analytic_p0 - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn entangle_measure_ancilla_is_theta_blind() {
    let thetas = [PI / 16.0, FRAC_PI_4, 3.0 * FRAC_PI_4];
    let shots = 10_000u64;
    let mut rng = master_rng(606);
    for trial in 0..5u64 {
        // Random valid columns: unit (a, c) and unit (b, d).
        let mut unit_pair = || {
            let x = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let y = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
            (x.unscale(norm), y.unscale(norm))
        };
        let (a, c) = unit_pair();
        let (b, d) = unit_pair();
        let eve = EveUnitary::from_amplitudes(a, b, c, d).unwrap();
        let report = attack_entangle_measure(&eve, &thetas, shots, 700 + trial).unwrap();
        assert!(
            report.max_analytic_deviation < 1e-12,
            "trial {trial}: ancilla marginal moved {}",
            report.max_analytic_deviation
        );
        // Sampled TV consistent with zero: 3σ for a difference of two
        // binomial frequencies at 10^4 shots.
        let tv_bound = 3.0 * (2.0 * 0.25 / shots as f64).sqrt();
        assert!(
            report.max_sampled_tv_distance < tv_bound,
            "trial {trial}: TV {} above {tv_bound}",
            report.max_sampled_tv_distance
        );
    }
}

#[test]
fn entangling_attack_marks_the_swap_test() {
    // A strongly entangling attack cannot hide from the chain comparison.
    let eve = EveUnitary::from_amplitudes(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    )
    .unwrap();
    let report = attack_entangle_measure(&eve, &[FRAC_PI_4], 1024, 3).unwrap();
    assert!(report.swap_test_p0_vs_honest < 1.0 - 1e-3);
    assert!(report.max_analytic_deviation < 1e-12);
}

#[test]
fn mitm_without_secret_is_always_caught() {
    let base = network(3, false);
    let stats = attack_mitm(&base, 300, MitmMode::WithoutSecret, 41).unwrap();
    assert_eq!(stats.detections, stats.rounds);
    assert_eq!(stats.peer_passes, 0);
}

#[test]
fn mitm_with_secret_reduces_to_intercept_resend() {
    let base = network(1, false);
    let stats = attack_mitm(&base, 10_000, MitmMode::WithSecretUniformForge, 42).unwrap();
    assert!(
        within_3_sigma(stats.peer_pass_rate, 0.5, stats.peer_trials),
        "pass rate {}",
        stats.peer_pass_rate
    );
}

#[test]
fn passive_relay_is_invisible_and_learns_nothing() {
    let base = network(4, false);
    let stats = attack_mitm(&base, 200, MitmMode::PassiveRelay, 43).unwrap();
    assert_eq!(stats.detections, 0);
    assert_eq!(stats.peer_passes, stats.peer_trials);
    assert_eq!(stats.copies_intercepted, 0);
}

#[test]
fn scaled_mode_rejects_inconsistent_phases() {
    let mut net = network(3, true);
    let mut rng = master_rng(77);
    // Round 1 fixes θ_1A = π/16, θ_1B = π/16.
    let r1 = net.mint_round("001", Some("001"), &mut rng).unwrap();
    assert!(r1.committed);
    // Round 2 with the scaled phases: owner "001" at m = 2 halves both.
    let r2 = net.mint_round("001", Some("010"), &mut rng).unwrap();
    assert!(r2.committed, "scaled-consistent round must commit");

    // A fresh network where round 2 discloses unscaled info phases.
    let mut net = network(3, true);
    let mut rng = master_rng(78);
    net.mint_round("001", Some("001"), &mut rng).unwrap();
    let bad = net.mint_round("010", Some("010"), &mut rng).unwrap();
    assert!(!bad.committed, "scaling violation must abort");
    assert!(bad
        .verdicts
        .values()
        .all(|v| *v == qnft_core::report::Verdict::FailScaling));
}

#[test]
fn single_tampered_peer_aborts_half_the_rounds() {
    // A π/2 offset on one peer's copy: that peer passes with probability
    // cos²(π/4) = 1/2, and any single failure aborts the round.
    let rounds = 10_000u64;
    let mut aborts = 0u64;
    for round in 0..rounds {
        let mut net = network(3, false);
        net.set_channel(
            1,
            Adversary::InterceptResend(GuessStrategy::FixedOffset(FRAC_PI_2)),
        )
        .unwrap();
        let mut rng = derived_rng(6161, round);
        let report = net.mint_round("001", None, &mut rng).unwrap();
        if !report.committed {
            aborts += 1;
        }
    }
    let freq = aborts as f64 / rounds as f64;
    assert!(
        within_3_sigma(freq, 0.5, rounds),
        "abort frequency {freq} outside 3σ of 0.5"
    );
}

#[test]
fn pi_tampered_block_shows_in_the_swap_test() {
    // One chain carries a π phase on one block; the swap test reports the
    // analytic overlap, confirmed by the raw dot product.
    let build = |tamper: bool| {
        let mut chain = ChainState::new(PhaseEncoding::default());
        chain.append_block(Block::from_phases(1, 0.2, 0.1)).unwrap();
        chain
            .append_block(Block::from_phases(2, 0.05, 0.02))
            .unwrap();
        if tamper {
            let mut register = chain.register().unwrap().clone();
            register.apply(qnft_core::Gate::Phase(PI), &[2]).unwrap();
            return (chain, Some(register));
        }
        (chain, None)
    };
    let (honest, _) = build(false);
    let (_, tampered) = build(true);
    let tampered = tampered.unwrap();

    let overlap: Complex64 = honest
        .register()
        .unwrap()
        .amplitudes()
        .iter()
        .zip(tampered.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum();
    let expect = (1.0 + overlap.norm_sqr()) / 2.0;

    let mut rng = master_rng(717);
    let result =
        qnft_core::protocol::swap_test(honest.register().unwrap(), &tampered, 4, 10_000, &mut rng)
            .unwrap();
    assert!((result.analytic_p0 - expect).abs() < 1e-12);
    assert!(result.analytic_p0 < 1.0 - 1e-3, "tamper must reduce P(0)");
    assert!(within_3_sigma(result.sampled_p0, expect, 10_000));
}

#[test]
fn untrusted_peer_verdicts_do_not_block_commits() {
    // The untrusted peer sits behind a π-offset channel and always fails;
    // the round still commits because quorum counts trusted peers only.
    let mut net = network(4, false);
    net.set_trusted(3, false).unwrap();
    net.set_channel(
        3,
        Adversary::InterceptResend(GuessStrategy::FixedOffset(PI)),
    )
    .unwrap();
    let mut rng = master_rng(2024);
    let report = net.mint_round("001", None, &mut rng).unwrap();
    assert!(report.committed);
    assert!(!report.verdicts["p3"].passed());
    // Everyone, including the untrusted peer, integrates the block.
    for peer in net.peers() {
        assert_eq!(peer.chain.len(), 1);
    }
}

#[test]
fn sub_unanimous_quorum_tolerates_failures() {
    let make = |quorum: f64| {
        Network::new(NetworkConfig {
            encoding: PhaseEncoding::default(),
            policy: PolicyConfig {
                quorum,
                ..PolicyConfig::default()
            },
            scaled_mode: false,
            peers: (0..5)
                .map(|i| (PeerId::new(format!("p{i}")), 10.0))
                .collect(),
            initial_holding_ticks: 1,
            genesis_secret: 0x9f17,
        })
        .unwrap()
    };
    // Two of five peers always fail (π offset); 3 passes meet a 0.5
    // quorum but not unanimity.
    for (quorum, expect_commit) in [(0.5, true), (1.0, false)] {
        let mut net = make(quorum);
        for idx in [1usize, 4] {
            net.set_channel(
                idx,
                Adversary::InterceptResend(GuessStrategy::FixedOffset(PI)),
            )
            .unwrap();
        }
        let mut rng = master_rng(31);
        let report = net.mint_round("001", None, &mut rng).unwrap();
        assert_eq!(
            report.committed, expect_commit,
            "quorum {quorum}: committed = {}",
            report.committed
        );
    }
}

#[test]
fn reports_are_byte_identical_under_a_seed() {
    let run = |seed: u64| -> String {
        let mut net = network(5, false);
        let mut rng = master_rng(seed);
        let mut reports = Vec::new();
        for _ in 0..3 {
            reports.push(net.mint_round("010", None, &mut rng).unwrap());
        }
        serde_json::to_string(&reports).unwrap()
    };
    assert_eq!(run(123), run(123));
    assert_ne!(run(123), run(124));
}
