//! Classical-to-phase codecs.
//!
//! Two distinct bit conventions coexist and both are load-bearing:
//!
//! * **Info encoding** (owner/asset record): bits are read left to right,
//!   position i = 1 at the leftmost character, with weight θ₁/2^{i−1}. The
//!   block phase is scaled by 1/n^{m−1} for block index m. Example with
//!   θ₁ = π/4, m = 1: "110" → π/4 + π/8 + 0 = 3π/8.
//! * **Token encoding** (random phase): bits are indexed right to left,
//!   position i = 1 at the rightmost character, with weight θ₁/2^{k+i} for
//!   peer parameter k. Example with θ₁ = π, k = 1: "110" → π/16 + π/8 + 0
//!   = 3π/16.
//!
//! Phases are compared at 1e-9 rad throughout: far above f64 noise, far
//! below the smallest lattice step for info lengths up to 30.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Gate, StateVector};

/// Absolute tolerance for phase comparison (radians).
pub const PHASE_TOLERANCE: f64 = 1e-9;

/// Info-bit reading direction. The protocol's worked examples fix the
/// most-significant-first convention; the alternative is kept for
/// experimentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BitOrder {
    /// Leftmost character carries the largest weight θ₁ (position i = 1).
    #[default]
    MsbFirst,
    /// Rightmost character carries the largest weight.
    LsbFirst,
}

/// Chain-wide encoding parameters, fixed at genesis and identical across
/// peers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEncoding {
    /// Base angle θ₁ (radians), > 0.
    pub theta1: f64,
    /// Block scaling base n in θ_m = θ₁/n^{m−1}.
    pub base: u32,
    /// Fixed info payload length L.
    pub info_len: usize,
    /// Number of token qubits q.
    pub token_qubits: usize,
    /// Token peer parameter k in θ = Σ bᵢ·θ₁/2^{k+i}.
    pub peer_k: u32,
    /// Info bit reading direction.
    #[serde(default)]
    pub info_bit_order: BitOrder,
}

impl PhaseEncoding {
    pub fn validate(&self) -> Result<()> {
        if self.theta1 <= 0.0 || !self.theta1.is_finite() {
            return Err(Error::Parameter(format!(
                "theta1 must be positive and finite, got {}",
                self.theta1
            )));
        }
        if self.base < 2 {
            return Err(Error::Parameter(format!(
                "scaling base must be ≥ 2, got {}",
                self.base
            )));
        }
        if !(3..=64).contains(&self.info_len) {
            return Err(Error::Parameter(format!(
                "info length must be in 3..=64, got {}",
                self.info_len
            )));
        }
        if !(1..=50).contains(&self.token_qubits) {
            return Err(Error::Capacity(format!(
                "token qubits must be in 1..=50, got {}",
                self.token_qubits
            )));
        }
        Ok(())
    }
}

impl Default for PhaseEncoding {
    fn default() -> Self {
        Self {
            theta1: std::f64::consts::FRAC_PI_4,
            base: 2,
            info_len: 3,
            token_qubits: 3,
            peer_k: 1,
            info_bit_order: BitOrder::MsbFirst,
        }
    }
}

/// Owner/asset record destined for a specific block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfoPayload {
    pub bits: String,
    /// Block index m, 1-based.
    pub block_index: usize,
}

impl InfoPayload {
    pub fn new(bits: impl Into<String>, block_index: usize) -> Self {
        Self {
            bits: bits.into(),
            block_index,
        }
    }
}

fn check_bits(bits: &str, expected_len: usize) -> Result<()> {
    if bits.len() != expected_len {
        return Err(Error::Codec(format!(
            "payload length {} does not match fixed length {expected_len}",
            bits.len()
        )));
    }
    if let Some(c) = bits.chars().find(|c| *c != '0' && *c != '1') {
        return Err(Error::Codec(format!("non-binary symbol '{c}' in payload")));
    }
    Ok(())
}

/// θ_mA = (1/n^{m−1}) · Σ_{i=1..L} bitᵢ · θ₁/2^{i−1}.
pub fn encode_info(payload: &InfoPayload, enc: &PhaseEncoding) -> Result<f64> {
    check_bits(&payload.bits, enc.info_len)?;
    if payload.block_index == 0 {
        return Err(Error::Codec("block index is 1-based".into()));
    }
    let mut sum = 0.0f64;
    for (pos, c) in payload.bits.chars().enumerate() {
        // Position i = 1 at the leftmost char for MsbFirst.
        let i = match enc.info_bit_order {
            BitOrder::MsbFirst => pos + 1,
            BitOrder::LsbFirst => enc.info_len - pos,
        };
        if c == '1' {
            sum += enc.theta1 * (0.5f64).powi(i as i32 - 1);
        }
    }
    Ok(sum / f64::from(enc.base).powi(payload.block_index as i32 - 1))
}

/// Inverse of [`encode_info`]: the unique bit string whose encoding matches
/// θ within [`PHASE_TOLERANCE`], or a decode error when θ is off-lattice.
pub fn decode_info(theta: f64, enc: &PhaseEncoding, block_index: usize) -> Result<String> {
    if block_index == 0 {
        return Err(Error::Codec("block index is 1-based".into()));
    }
    let l = enc.info_len;
    // Encoded phases form a lattice with unit step θ₁/2^{L−1} (before block
    // scaling); the bit string is the binary expansion of the step count.
    let descale = f64::from(enc.base).powi(block_index as i32 - 1);
    let unit = enc.theta1 * (0.5f64).powi(l as i32 - 1);
    let steps = theta * descale / unit;
    let k = steps.round();
    if !(0.0..(2.0f64).powi(l as i32)).contains(&k) {
        return Err(Error::Decode(format!(
            "phase {theta} outside the encodable range for L = {l}"
        )));
    }
    let k = k as u128;
    let bits: String = (0..l)
        .map(|pos| {
            let bit_pos = match enc.info_bit_order {
                BitOrder::MsbFirst => l - 1 - pos,
                BitOrder::LsbFirst => pos,
            };
            if k & (1u128 << bit_pos) != 0 {
                '1'
            } else {
                '0'
            }
        })
        .collect();
    let payload = InfoPayload::new(bits.clone(), block_index);
    let roundtrip = encode_info(&payload, enc)?;
    if (roundtrip - theta).abs() > PHASE_TOLERANCE {
        return Err(Error::Decode(format!(
            "phase {theta} is {:.3e} rad off the encoding lattice",
            (roundtrip - theta).abs()
        )));
    }
    Ok(bits)
}

/// A minted token: the measured bits, the derived phase, and the peer
/// parameter that fixed the weight ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    /// Measured bits, rightmost character is position i = 1.
    pub bits: String,
    /// θ = Σ bᵢ·θ₁/2^{k+i}.
    pub theta: f64,
    pub peer_k: u32,
}

/// Pure token phase function; position i = 1 at the rightmost character.
pub fn token_phase(bits: &str, theta1: f64, peer_k: u32) -> Result<f64> {
    check_bits(bits, bits.len())?;
    let mut sum = 0.0f64;
    for (pos, c) in bits.chars().rev().enumerate() {
        let i = pos + 1;
        if c == '1' {
            sum += theta1 * (0.5f64).powi(peer_k as i32 + i as i32);
        }
    }
    Ok(sum)
}

impl Token {
    /// Rebuild a token from recorded bits; the phase is re-derived.
    pub fn from_bits(bits: impl Into<String>, enc: &PhaseEncoding) -> Result<Self> {
        let bits = bits.into();
        if bits.len() != enc.token_qubits {
            return Err(Error::Codec(format!(
                "token has {} bits, chain uses {}",
                bits.len(),
                enc.token_qubits
            )));
        }
        let theta = token_phase(&bits, enc.theta1, enc.peer_k)?;
        Ok(Self {
            bits,
            theta,
            peer_k: enc.peer_k,
        })
    }
}

/// Mint a token: q qubits, each prepared with a Hadamard and measured.
///
/// Tokens are product states, so each bit comes from its own single-qubit
/// register; this is what lets q range to 50 while entangled registers cap
/// at 16 qubits.
pub fn generate_token<R: Rng + ?Sized>(enc: &PhaseEncoding, rng: &mut R) -> Result<Token> {
    if !(1..=50).contains(&enc.token_qubits) {
        return Err(Error::Capacity(format!(
            "token qubits must be in 1..=50, got {}",
            enc.token_qubits
        )));
    }
    // b_1 is measured first; the string stores b_q … b_1 left to right.
    let mut reversed = Vec::with_capacity(enc.token_qubits);
    for _ in 0..enc.token_qubits {
        let mut q = StateVector::<f64>::new(1)?;
        q.apply(Gate::H, &[0])?;
        reversed.push(q.measure_computational(0, rng)?);
    }
    let bits: String = reversed
        .iter()
        .rev()
        .map(|b| if *b == 1 { '1' } else { '0' })
        .collect();
    let theta = token_phase(&bits, enc.theta1, enc.peer_k)?;
    Ok(Token {
        bits,
        theta,
        peer_k: enc.peer_k,
    })
}

/// Strict chain-wide budget rule: Σ (θ_A + θ_B) < π.
pub fn budget_ok(chain_phases: &[(f64, f64)]) -> bool {
    let total: f64 = chain_phases.iter().map(|(a, b)| a + b).sum();
    total < std::f64::consts::PI
}

/// [`budget_ok`] as an enforcement point.
pub fn ensure_budget(chain_phases: &[(f64, f64)]) -> Result<()> {
    if budget_ok(chain_phases) {
        Ok(())
    } else {
        let total: f64 = chain_phases.iter().map(|(a, b)| a + b).sum();
        Err(Error::Constraint(format!(
            "phase budget violated: Σ(θ_A + θ_B) = {total} ≥ π"
        )))
    }
}
