//! The mint → broadcast → verify → integrate flow across simulated peers,
//! plus the swap-test chain comparison and the channel adversary model.
//!
//! Key transport rule: the minter prepares one fresh copy of the block
//! state per peer (respecting no-cloning while matching the broadcast), and
//! nothing else ever duplicates a quantum payload between peers. The round
//! report counts preparations so tests can audit the rule.
//!
//! Key exchange is abstracted as an authenticated, confidential classical
//! channel carrying a genesis shared secret tag. This models the identity
//! authentication the protocol assumes; it is an abstraction, not a
//! cryptographic construction.

pub mod attack;

use rand::Rng;
use std::collections::BTreeMap;

use crate::codec::{self, InfoPayload, PhaseEncoding, Token, PHASE_TOLERANCE};
use crate::consensus::{PeerId, StakeLedger};
use crate::error::{Error, Result};
use crate::ledger::{Block, BlockRecord, ChainState};
use crate::report::{RoundReport, SwapTestResult, Verdict};
use crate::sim::{measure_in_block_basis, BlockBasisOutcome, Gate, StateVector};

pub use attack::{
    attack_entangle_measure, attack_intercept_resend, attack_mitm, EveUnitary, GuessStrategy,
    MitmMode,
};

/// Round policy fixed at genesis.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PolicyConfig {
    /// Minimum stake a validator must hold to matter; rewards stay below it.
    pub min_stake: f64,
    /// Coins credited to the validator of a committed round.
    pub reward: f64,
    /// Coin fraction burned on an aborted round.
    pub slash_fraction: f64,
    /// Fraction of honest peers that must pass for a commit (1.0 =
    /// unanimous).
    pub quorum: f64,
    /// Reset the winner's coin-age after a win.
    pub reset_age_on_win: bool,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            min_stake: 5.0,
            reward: 1.0,
            slash_fraction: 0.5,
            quorum: 1.0,
            reset_age_on_win: true,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_stake <= 0.0 {
            return Err(Error::Config("policy.min_stake: must be > 0".into()));
        }
        if self.reward < 0.0 || self.reward >= self.min_stake {
            return Err(Error::Config(format!(
                "policy.reward: must satisfy 0 ≤ reward < min_stake, got {} vs {}",
                self.reward, self.min_stake
            )));
        }
        if !(self.slash_fraction > 0.0 && self.slash_fraction <= 1.0) {
            return Err(Error::Config(
                "policy.slash_fraction: must be in (0, 1]".into(),
            ));
        }
        if !(self.quorum > 0.0 && self.quorum <= 1.0) {
            return Err(Error::Config("policy.quorum: must be in (0, 1]".into()));
        }
        Ok(())
    }
}

/// One simulated participant.
#[derive(Debug, Clone)]
pub struct Peer {
    pub id: PeerId,
    pub chain: ChainState,
    pub trusted: bool,
    /// Per-peer copy of the append-only chain log records.
    pub records: Vec<BlockRecord>,
}

/// Adversary installed on one peer's delivery channel.
#[derive(Debug, Clone)]
pub enum Adversary {
    None,
    InterceptResend(GuessStrategy),
    EntangleMeasure(EveUnitary),
    Mitm(MitmMode),
}

/// The quantum payload plus the authenticated classical disclosure.
#[derive(Debug, Clone)]
struct Delivery {
    state: StateVector<f64>,
    theta_a: f64,
    theta_b: f64,
    tag: u64,
}

#[derive(Debug, Clone)]
pub struct NetworkConfig {
    pub encoding: PhaseEncoding,
    pub policy: PolicyConfig,
    /// Check disclosed phases against θ_m = θ₁/n^{m−1}.
    pub scaled_mode: bool,
    /// (peer id, initial coins) pairs.
    pub peers: Vec<(PeerId, f64)>,
    pub initial_holding_ticks: u64,
    pub genesis_secret: u64,
}

/// The simulated peer network and its coordinator state.
#[derive(Debug, Clone)]
pub struct Network {
    pub encoding: PhaseEncoding,
    pub policy: PolicyConfig,
    pub scaled_mode: bool,
    genesis_secret: u64,
    peers: Vec<Peer>,
    channels: Vec<Adversary>,
    pub ledger: StakeLedger,
    rounds_run: u64,
}

impl Network {
    pub fn new(config: NetworkConfig) -> Result<Self> {
        config.encoding.validate()?;
        config.policy.validate()?;
        if config.peers.is_empty() {
            return Err(Error::Config("peers: at least one peer required".into()));
        }
        let mut ledger = StakeLedger::new(config.policy.min_stake, config.policy.reset_age_on_win);
        let mut peers = Vec::with_capacity(config.peers.len());
        for (id, coins) in &config.peers {
            ledger.add_peer(id.clone(), *coins, config.initial_holding_ticks)?;
            peers.push(Peer {
                id: id.clone(),
                chain: ChainState::new(config.encoding.clone()),
                trusted: true,
                records: Vec::new(),
            });
        }
        let channels = vec![Adversary::None; peers.len()];
        Ok(Self {
            encoding: config.encoding,
            policy: config.policy,
            scaled_mode: config.scaled_mode,
            genesis_secret: config.genesis_secret,
            peers,
            channels,
            ledger,
            rounds_run: 0,
        })
    }

    pub fn peers(&self) -> &[Peer] {
        &self.peers
    }

    pub fn peer(&self, id: &PeerId) -> Option<&Peer> {
        self.peers.iter().find(|p| &p.id == id)
    }

    pub fn set_channel(&mut self, peer_index: usize, adversary: Adversary) -> Result<()> {
        if peer_index >= self.channels.len() {
            return Err(Error::Protocol(format!("no peer at index {peer_index}")));
        }
        self.channels[peer_index] = adversary;
        Ok(())
    }

    pub fn set_all_channels(&mut self, adversary: Adversary) {
        for c in &mut self.channels {
            *c = adversary.clone();
        }
    }

    /// Mark a peer as untrusted: it still verifies and appends, but its
    /// verdict no longer counts toward the commit quorum.
    pub fn set_trusted(&mut self, peer_index: usize, trusted: bool) -> Result<()> {
        let peer = self
            .peers
            .get_mut(peer_index)
            .ok_or_else(|| Error::Protocol(format!("no peer at index {peer_index}")))?;
        peer.trusted = trusted;
        Ok(())
    }

    fn chain_len(&self) -> usize {
        self.peers[0].chain.len()
    }

    /// Restore every peer to a previously persisted chain after a process
    /// restart. Stake clocks fast-forward one tick per logged block, the
    /// same cadence live rounds advance them.
    pub fn restore_chains(&mut self, chain: &ChainState, records: &[BlockRecord]) -> Result<()> {
        if chain.encoding() != &self.encoding {
            return Err(Error::Config(
                "encoding: restored chain does not match the network genesis".into(),
            ));
        }
        if chain.len() != records.len() {
            return Err(Error::ChainLog(format!(
                "chain has {} blocks but {} records",
                chain.len(),
                records.len()
            )));
        }
        for peer in &mut self.peers {
            peer.chain = chain.clone();
            peer.records = records.to_vec();
        }
        self.ledger.advance_time(records.len() as u64);
        self.rounds_run = records.len() as u64;
        Ok(())
    }

    /// One full consensus round. The token is freshly minted unless
    /// `pinned_token_bits` replays a known token (used by reproducible
    /// presets). Aborts are a report outcome, not an error.
    pub fn mint_round<R: Rng + ?Sized>(
        &mut self,
        owner_bits: &str,
        pinned_token_bits: Option<&str>,
        rng: &mut R,
    ) -> Result<RoundReport> {
        debug_assert!(self.peers.iter().all(|p| p.chain.len() == self.chain_len()));

        let validator = self.ledger.select_validator(rng)?;
        let m = self.chain_len() + 1;

        let info = InfoPayload::new(owner_bits, m);
        let token = match pinned_token_bits {
            Some(bits) => Token::from_bits(bits, &self.encoding)?,
            None => codec::generate_token(&self.encoding, rng)?,
        };
        let block = Block::derive(info, token, &self.encoding)?;

        // Precondition: the budget must admit one more block.
        let mut phases = self.peers[0].chain.phases();
        phases.push((block.theta_a, block.theta_b));
        codec::ensure_budget(&phases)?;

        // Intercepting adversaries commit to one forged guess per round.
        let forge_phase = self.round_forge_phase(block.theta_a + block.theta_b, rng);

        let mut preparations = 0usize;
        let mut verdicts: BTreeMap<String, Verdict> = BTreeMap::new();
        for idx in 0..self.peers.len() {
            // The minter prepares a fresh copy for this peer.
            let state = crate::ledger::create_block_state(block.theta_a, block.theta_b)?;
            preparations += 1;
            let delivery = Delivery {
                state,
                theta_a: block.theta_a,
                theta_b: block.theta_b,
                tag: self.genesis_secret,
            };
            let delivery = self.transit(idx, delivery, forge_phase, rng)?;
            let verdict = self.verify_delivery(idx, m, delivery, rng)?;
            verdicts.insert(self.peers[idx].id.0.clone(), verdict);
        }

        let honest: Vec<&Peer> = self.peers.iter().filter(|p| p.trusted).collect();
        let honest_passes = honest
            .iter()
            .filter(|p| verdicts.get(&p.id.0).is_some_and(|v| v.passed()))
            .count();
        let needed = (self.policy.quorum * honest.len() as f64).ceil() as usize;
        let committed = honest_passes >= needed.max(1);

        let mut rewarded = false;
        let mut slashed = false;
        let abort_reason = if committed {
            let record = BlockRecord {
                m,
                owner_bits: block.info.as_ref().map(|i| i.bits.clone()),
                token_bits: block.token.as_ref().map(|t| t.bits.clone()),
                theta_a: block.theta_a,
                theta_b: block.theta_b,
                verifier_outcomes: verdicts
                    .iter()
                    .map(|(k, v)| (k.clone(), v.label().to_string()))
                    .collect(),
            };
            for peer in &mut self.peers {
                peer.chain.append_block(block.clone())?;
                peer.records.push(record.clone());
            }
            self.ledger.reward(&validator, self.policy.reward)?;
            self.ledger.record_win(&validator)?;
            rewarded = true;
            None
        } else {
            self.ledger.slash(&validator, self.policy.slash_fraction)?;
            slashed = true;
            Some(format!(
                "verification failed on {} of {} honest peers; token discarded",
                honest.len() - honest_passes,
                honest.len()
            ))
        };

        self.ledger.advance_time(1);
        self.rounds_run += 1;
        Ok(RoundReport {
            round_id: self.rounds_run,
            winner: validator.0,
            block_index: m,
            theta_a: block.theta_a,
            theta_b: block.theta_b,
            verdicts,
            committed,
            abort_reason,
            preparations,
            validator_rewarded: rewarded,
            validator_slashed: slashed,
        })
    }

    /// Draw the per-round forged phase for intercepting adversaries, if any
    /// channel needs one.
    fn round_forge_phase<R: Rng + ?Sized>(&self, true_phase: f64, rng: &mut R) -> f64 {
        let needs_guess = self.channels.iter().any(|c| {
            matches!(
                c,
                Adversary::InterceptResend(GuessStrategy::UniformPhase)
                    | Adversary::Mitm(MitmMode::WithSecretUniformForge)
                    | Adversary::Mitm(MitmMode::WithoutSecret)
            )
        });
        if needs_guess {
            rng.gen::<f64>() * std::f64::consts::TAU
        } else {
            true_phase
        }
    }

    /// Run a delivery through the peer's channel adversary.
    fn transit<R: Rng + ?Sized>(
        &self,
        peer_index: usize,
        delivery: Delivery,
        uniform_guess: f64,
        _rng: &mut R,
    ) -> Result<Delivery> {
        let forged = |phase: f64| -> Result<StateVector<f64>> {
            let mut s = StateVector::new(2)?;
            s.bell_pair(0, 1)?;
            s.apply(Gate::Phase(phase), &[0])?;
            Ok(s)
        };
        match &self.channels[peer_index] {
            Adversary::None => Ok(delivery),
            Adversary::InterceptResend(strategy) => {
                let truth = delivery.theta_a + delivery.theta_b;
                let guess = match strategy {
                    GuessStrategy::ExactPhase => truth,
                    GuessStrategy::FixedOffset(delta) => truth + delta,
                    GuessStrategy::UniformPhase => uniform_guess,
                };
                Ok(Delivery {
                    state: forged(guess)?,
                    ..delivery
                })
            }
            Adversary::EntangleMeasure(eve) => {
                let ancilla = StateVector::new(1)?;
                let mut joint = delivery.state.tensor(&ancilla)?;
                joint.apply_dense_unitary(eve.matrix(), &[0, 1, 2])?;
                Ok(Delivery {
                    state: joint,
                    ..delivery
                })
            }
            Adversary::Mitm(mode) => match mode {
                MitmMode::PassiveRelay => Ok(delivery),
                MitmMode::WithoutSecret => Ok(Delivery {
                    state: forged(uniform_guess)?,
                    tag: delivery.tag.wrapping_add(1),
                    ..delivery
                }),
                MitmMode::WithSecretUniformForge => Ok(Delivery {
                    state: forged(uniform_guess)?,
                    ..delivery
                }),
            },
        }
    }

    /// Peer-side verification: authenticate the classical message, check
    /// the scaled-phase rule when enabled, then measure in the block basis.
    fn verify_delivery<R: Rng + ?Sized>(
        &mut self,
        peer_index: usize,
        m: usize,
        mut delivery: Delivery,
        rng: &mut R,
    ) -> Result<Verdict> {
        if delivery.tag != self.genesis_secret {
            return Ok(Verdict::FailAuth);
        }
        if self.scaled_mode && m >= 2 {
            let chain = &self.peers[peer_index].chain;
            let first = &chain.blocks()[0];
            let scale = f64::from(self.encoding.base).powi(m as i32 - 1);
            let expect_a = first.theta_a / scale;
            let expect_b = first.theta_b / scale;
            if (delivery.theta_a - expect_a).abs() > PHASE_TOLERANCE
                || (delivery.theta_b - expect_b).abs() > PHASE_TOLERANCE
            {
                return Ok(Verdict::FailScaling);
            }
        }
        let theta = delivery.theta_a + delivery.theta_b;
        let outcome = measure_in_block_basis(&mut delivery.state, 0, 1, theta, rng)?;
        Ok(match outcome {
            BlockBasisOutcome::Plus => Verdict::Pass,
            BlockBasisOutcome::Minus => Verdict::FailMinus,
            BlockBasisOutcome::Leak01 => Verdict::FailLeak01,
            BlockBasisOutcome::Leak10 => Verdict::FailLeak10,
        })
    }
}

/// The verification rule alone: measure a received block state in the
/// basis of the disclosed phases; pass iff the outcome is |+_Θ⟩.
pub fn verify_block<R: Rng + ?Sized>(
    state: &mut StateVector<f64>,
    theta_a: f64,
    theta_b: f64,
    rng: &mut R,
) -> Result<Verdict> {
    let outcome = measure_in_block_basis(state, 0, 1, theta_a + theta_b, rng)?;
    Ok(match outcome {
        BlockBasisOutcome::Plus => Verdict::Pass,
        BlockBasisOutcome::Minus => Verdict::FailMinus,
        BlockBasisOutcome::Leak01 => Verdict::FailLeak01,
        BlockBasisOutcome::Leak10 => Verdict::FailLeak10,
    })
}

/// Ancilla-controlled swap test between the first `swap_width` qubits of
/// two registers. Returns the circuit-exact P(ancilla = 0) and a
/// Monte-Carlo estimate at `shots`; for pure equal-width registers the
/// exact value is (1 + |⟨ψ_a|ψ_b⟩|²)/2.
pub fn swap_test<R: Rng + ?Sized>(
    a: &StateVector<f64>,
    b: &StateVector<f64>,
    swap_width: usize,
    shots: u64,
    rng: &mut R,
) -> Result<SwapTestResult> {
    if swap_width == 0 || swap_width > a.n_qubits() || swap_width > b.n_qubits() {
        return Err(Error::Protocol(format!(
            "swap width {swap_width} exceeds register widths {} and {}",
            a.n_qubits(),
            b.n_qubits()
        )));
    }
    let ancilla = StateVector::new(1)?;
    let mut joint = ancilla.tensor(a)?.tensor(b)?;
    joint.apply(Gate::H, &[0])?;
    for i in 0..swap_width {
        joint.apply(Gate::CSwap, &[0, 1 + i, 1 + a.n_qubits() + i])?;
    }
    joint.apply(Gate::H, &[0])?;
    let p0 = 1.0 - joint.prob_one(0)?;
    let mut zeros = 0u64;
    for _ in 0..shots {
        if rng.gen::<f64>() < p0 {
            zeros += 1;
        }
    }
    Ok(SwapTestResult {
        swapped_qubits: swap_width,
        shots,
        analytic_p0: p0,
        sampled_p0: if shots == 0 {
            p0
        } else {
            zeros as f64 / shots as f64
        },
    })
}

/// Swap-test comparison of two peers' full chain registers.
pub fn compare_chains_swap_test<R: Rng + ?Sized>(
    chain_m: &ChainState,
    chain_n: &ChainState,
    shots: u64,
    rng: &mut R,
) -> Result<SwapTestResult> {
    let reg_m = chain_m
        .register()
        .ok_or_else(|| Error::Protocol("first chain is empty".into()))?;
    let reg_n = chain_n
        .register()
        .ok_or_else(|| Error::Protocol("second chain is empty".into()))?;
    if reg_m.n_qubits() != reg_n.n_qubits() {
        return Err(Error::Protocol(format!(
            "chain widths differ: {} vs {} qubits",
            reg_m.n_qubits(),
            reg_n.n_qubits()
        )));
    }
    if reg_m.n_qubits() > 6 {
        return Err(Error::Protocol(format!(
            "swap test compares chains up to 6 qubits, got {}",
            reg_m.n_qubits()
        )));
    }
    swap_test(reg_m, reg_n, reg_m.n_qubits(), shots, rng)
}
