//! Run configuration: one JSON document plus flag overrides; flags win.

use serde::{Deserialize, Serialize};
use std::path::Path;

use qnft_core::codec::PhaseEncoding;
use qnft_core::consensus::PeerId;
use qnft_core::protocol::{Network, NetworkConfig, PolicyConfig};
use qnft_core::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeerSpec {
    pub id: String,
    pub coins: f64,
}

/// One mint round: the owner/asset record and, optionally, pinned token
/// bits for reproducing a known chain. Without `token_bits` the token is
/// minted from the seeded generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundSpec {
    pub owner_bits: String,
    #[serde(default)]
    pub token_bits: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenesisConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    pub peers: Vec<PeerSpec>,
    pub encoding: PhaseEncoding,
    pub policy: PolicyConfig,
    #[serde(default)]
    pub scaled_mode: bool,
    /// Per-gate depolarizing probability for tomography runs; absent or
    /// null means noiseless.
    #[serde(default)]
    pub noise: Option<f64>,
    #[serde(default = "default_shots")]
    pub shots: u64,
    pub rounds: Vec<RoundSpec>,
    #[serde(default = "default_secret")]
    pub genesis_secret: u64,
}

fn default_shots() -> u64 {
    100_000
}

fn default_secret() -> u64 {
    0x51ce_c0de
}

impl GenesisConfig {
    /// The built-in preset reproducing the two-block experiment chain:
    /// θ₁ = π/4, owner bits "001" per block, tokens "001" then "010",
    /// giving phases (π/16, π/16) and (π/32, π/32); zero noise, 100 000
    /// shots per setting.
    pub fn two_block_preset() -> Self {
        Self {
            seed: None,
            peers: (0..5)
                .map(|i| PeerSpec {
                    id: format!("p{i}"),
                    coins: 10.0,
                })
                .collect(),
            encoding: PhaseEncoding::default(),
            policy: PolicyConfig::default(),
            scaled_mode: false,
            noise: None,
            shots: default_shots(),
            rounds: vec![
                RoundSpec {
                    owner_bits: "001".into(),
                    token_bits: Some("001".into()),
                },
                RoundSpec {
                    owner_bits: "001".into(),
                    token_bits: Some("010".into()),
                },
            ],
            genesis_secret: default_secret(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.peers.is_empty() {
            return Err(Error::Config("peers: must not be empty".into()));
        }
        for (i, peer) in self.peers.iter().enumerate() {
            if peer.id.is_empty() {
                return Err(Error::Config(format!("peers[{i}].id: must not be empty")));
            }
            if !(peer.coins >= 0.0 && peer.coins.is_finite()) {
                return Err(Error::Config(format!(
                    "peers[{i}].coins: must be non-negative and finite, got {}",
                    peer.coins
                )));
            }
        }
        self.encoding
            .validate()
            .map_err(|e| Error::Config(format!("encoding: {e}")))?;
        self.policy.validate()?;
        if let Some(p) = self.noise {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("noise: must be in [0, 1], got {p}")));
            }
        }
        if self.shots == 0 {
            return Err(Error::Config("shots: must be ≥ 1".into()));
        }
        for (i, round) in self.rounds.iter().enumerate() {
            if round.owner_bits.len() != self.encoding.info_len {
                return Err(Error::Config(format!(
                    "rounds[{i}].owner_bits: length {} does not match encoding.info_len {}",
                    round.owner_bits.len(),
                    self.encoding.info_len
                )));
            }
            if let Some(bits) = &round.token_bits {
                if bits.len() != self.encoding.token_qubits {
                    return Err(Error::Config(format!(
                        "rounds[{i}].token_bits: length {} does not match encoding.token_qubits {}",
                        bits.len(),
                        self.encoding.token_qubits
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn build_network(&self) -> Result<Network> {
        Network::new(NetworkConfig {
            encoding: self.encoding.clone(),
            policy: self.policy.clone(),
            scaled_mode: self.scaled_mode,
            peers: self
                .peers
                .iter()
                .map(|p| (PeerId::new(p.id.clone()), p.coins))
                .collect(),
            initial_holding_ticks: 1,
            genesis_secret: self.genesis_secret,
        })
    }
}
