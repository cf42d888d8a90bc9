//! Proof-of-stake validator selection, rewards, and slashing.
//!
//! A peer's stake is coin-age: coins × holding ticks. Selection probability
//! is stake / total stake. Slashing burns a coin fraction and resets the
//! holding clock; winning a round also resets the clock when the
//! anti-hoarding policy flag is on.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PeerId(pub String);

impl PeerId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }
}

impl std::fmt::Display for PeerId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StakeEntry {
    pub coins: f64,
    pub holding_ticks: u64,
}

impl StakeEntry {
    /// Coin-age stake: coins × holding time.
    pub fn stake(&self) -> f64 {
        self.coins * self.holding_ticks as f64
    }
}

/// Per-peer coin and coin-age table. Iteration order is the peer-id order,
/// which keeps selection deterministic under a fixed seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StakeLedger {
    entries: BTreeMap<PeerId, StakeEntry>,
    /// Minimum stake a validator must be able to lose; rewards must stay
    /// strictly below it.
    min_stake_requirement: f64,
    /// Reset the winner's holding clock after a win.
    reset_age_on_win: bool,
}

impl StakeLedger {
    pub fn new(min_stake_requirement: f64, reset_age_on_win: bool) -> Self {
        Self {
            entries: BTreeMap::new(),
            min_stake_requirement,
            reset_age_on_win,
        }
    }

    pub fn add_peer(&mut self, id: PeerId, coins: f64, holding_ticks: u64) -> Result<()> {
        if coins < 0.0 || !coins.is_finite() {
            return Err(Error::Parameter(format!(
                "coins must be non-negative and finite, got {coins}"
            )));
        }
        self.entries.insert(
            id,
            StakeEntry {
                coins,
                holding_ticks,
            },
        );
        Ok(())
    }

    pub fn min_stake_requirement(&self) -> f64 {
        self.min_stake_requirement
    }

    pub fn entry(&self, id: &PeerId) -> Option<&StakeEntry> {
        self.entries.get(id)
    }

    pub fn peers(&self) -> impl Iterator<Item = &PeerId> {
        self.entries.keys()
    }

    pub fn stake_of(&self, id: &PeerId) -> Result<f64> {
        self.entries
            .get(id)
            .map(StakeEntry::stake)
            .ok_or_else(|| Error::Consensus(format!("unknown peer {id}")))
    }

    pub fn total_stake(&self) -> f64 {
        self.entries.values().map(StakeEntry::stake).sum()
    }

    /// Sample a validator with probability stake / total stake.
    ///
    /// Weights are normalized before the cumulative walk so the winner
    /// sequence is invariant under exact rescaling of all stakes.
    pub fn select_validator<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PeerId> {
        let total = self.total_stake();
        if total <= 0.0 {
            return Err(Error::Consensus(
                "no stake in the ledger; nothing to select from".into(),
            ));
        }
        let u: f64 = rng.gen();
        let mut acc = 0.0f64;
        let mut last = None;
        for (id, entry) in &self.entries {
            let w = entry.stake() / total;
            if w == 0.0 {
                continue;
            }
            acc += w;
            last = Some(id);
            if u < acc {
                return Ok(id.clone());
            }
        }
        // Rounding can leave acc slightly below 1; fall back to the last
        // positively staked peer.
        last.cloned()
            .ok_or_else(|| Error::Consensus("no positively staked peer".into()))
    }

    /// Burn a coin fraction and reset the holding clock.
    pub fn slash(&mut self, id: &PeerId, fraction: f64) -> Result<()> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Parameter(format!(
                "slash fraction must be in (0, 1], got {fraction}"
            )));
        }
        let entry = self
            .entries
            .get_mut(id)
            .ok_or_else(|| Error::Consensus(format!("unknown peer {id}")))?;
        entry.coins *= 1.0 - fraction;
        entry.holding_ticks = 0;
        Ok(())
    }

    /// Credit a round reward. Rewards must stay strictly below the stake
    /// minimum, so losing a stake always costs more than winning pays.
    pub fn reward(&mut self, id: &PeerId, amount: f64) -> Result<()> {
        if amount < 0.0 || !amount.is_finite() {
            return Err(Error::Parameter(format!(
                "reward must be non-negative, got {amount}"
            )));
        }
        if amount >= self.min_stake_requirement {
            return Err(Error::Policy(format!(
                "reward {amount} is not below the stake minimum {}",
                self.min_stake_requirement
            )));
        }
        let entry = self
            .entries
            .get_mut(id)
            .ok_or_else(|| Error::Consensus(format!("unknown peer {id}")))?;
        entry.coins += amount;
        Ok(())
    }

    /// Apply the post-win coin-age policy.
    pub fn record_win(&mut self, id: &PeerId) -> Result<()> {
        let entry = self
            .entries
            .get_mut(id)
            .ok_or_else(|| Error::Consensus(format!("unknown peer {id}")))?;
        if self.reset_age_on_win {
            entry.holding_ticks = 0;
        }
        Ok(())
    }

    pub fn advance_time(&mut self, ticks: u64) {
        for entry in self.entries.values_mut() {
            entry.holding_ticks += ticks;
        }
    }
}
