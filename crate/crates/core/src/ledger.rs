//! Blocks and per-peer chain copies.
//!
//! Block m (1-based) owns qubits (2(m−1), 2(m−1)+1): class A carries the
//! owner/asset phase θ_mA, class B the token phase θ_mB. Appending block m
//! tensors a fresh phased Bell pair onto the register and entangles it with
//! one (m−1)-controlled phase(π/2) per class: controls are all earlier
//! same-class qubits, target is the new same-class qubit.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::codec::{self, InfoPayload, PhaseEncoding, Token, PHASE_TOLERANCE};
use crate::error::{Error, Result};
use crate::sim::{Gate, GateOp, StateVector};

/// Chain registers are capped at 6 blocks (12 qubits).
pub const MAX_CHAIN_BLOCKS: usize = 6;

/// One NFT entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    /// Block index m, 1-based.
    pub index: usize,
    /// Owner/asset info phase θ_mA.
    pub theta_a: f64,
    /// Token phase θ_mB.
    pub theta_b: f64,
    /// Owner record; absent for raw-phase blocks reproducing published
    /// figures.
    pub info: Option<InfoPayload>,
    /// Token record; absent for raw-phase blocks.
    pub token: Option<Token>,
}

impl Block {
    /// Protocol-path constructor: phases derived from records.
    pub fn derive(info: InfoPayload, token: Token, enc: &PhaseEncoding) -> Result<Self> {
        let index = info.block_index;
        let theta_a = codec::encode_info(&info, enc)?;
        let theta_b = token.theta;
        Ok(Self {
            index,
            theta_a,
            theta_b,
            info: Some(info),
            token: Some(token),
        })
    }

    /// Figure-path constructor: raw phases with no classical records.
    pub fn from_phases(index: usize, theta_a: f64, theta_b: f64) -> Self {
        Self {
            index,
            theta_a,
            theta_b,
            info: None,
            token: None,
        }
    }

    /// Re-derive the phases from the classical records and check they match
    /// the stored values.
    pub fn check_rederivable(&self, enc: &PhaseEncoding) -> Result<()> {
        if let Some(info) = &self.info {
            let theta = codec::encode_info(info, enc)?;
            if (theta - self.theta_a).abs() > PHASE_TOLERANCE {
                return Err(Error::ChainLog(format!(
                    "block {}: θ_A {} does not re-derive from owner bits (got {theta})",
                    self.index, self.theta_a
                )));
            }
        }
        if let Some(token) = &self.token {
            let theta = codec::token_phase(&token.bits, enc.theta1, token.peer_k)?;
            if (theta - self.theta_b).abs() > PHASE_TOLERANCE {
                return Err(Error::ChainLog(format!(
                    "block {}: θ_B {} does not re-derive from token bits (got {theta})",
                    self.index, self.theta_b
                )));
            }
        }
        Ok(())
    }
}

/// 2-qubit block state (|00⟩ + e^{i(θ_A+θ_B)}|11⟩)/√2, qubit 0 = class A.
pub fn create_block_state(theta_a: f64, theta_b: f64) -> Result<StateVector<f64>> {
    codec::ensure_budget(&[(theta_a, theta_b)])?;
    let mut state = StateVector::new(2)?;
    state.apply_all(&block_circuit_at(0, theta_a, theta_b))?;
    Ok(state)
}

/// Mint circuit for one block whose class-A qubit is `qubit_a`.
fn block_circuit_at(qubit_a: usize, theta_a: f64, theta_b: f64) -> Vec<GateOp<f64>> {
    vec![
        GateOp::new(Gate::H, vec![qubit_a]),
        GateOp::new(Gate::Cnot, vec![qubit_a, qubit_a + 1]),
        GateOp::new(Gate::Phase(theta_a), vec![qubit_a]),
        GateOp::new(Gate::Phase(theta_b), vec![qubit_a + 1]),
    ]
}

/// The (m−1)-controlled phase(π/2) pair integrating block m, one gate per
/// class; empty for the genesis block.
fn entangle_ops(m: usize) -> Vec<GateOp<f64>> {
    if m < 2 {
        return Vec::new();
    }
    let mut ops = Vec::with_capacity(2);
    for class_offset in 0..2usize {
        let mut qubits: Vec<usize> = (1..m).map(|j| 2 * (j - 1) + class_offset).collect();
        qubits.push(2 * (m - 1) + class_offset);
        let gate = match m {
            2 => Gate::CPhase(FRAC_PI_2),
            3 => Gate::CcPhase(FRAC_PI_2),
            _ => Gate::McPhase {
                angle: FRAC_PI_2,
                controls: m - 1,
            },
        };
        ops.push(GateOp::new(gate, qubits));
    }
    ops
}

/// Canonical gate list realizing a whole chain; the single source for the
/// state-vector replay and the noisy density-matrix replay.
pub fn chain_circuit(blocks: &[Block]) -> Vec<GateOp<f64>> {
    let mut ops = Vec::new();
    for block in blocks {
        ops.extend(block_circuit_at(
            2 * (block.index - 1),
            block.theta_a,
            block.theta_b,
        ));
        ops.extend(entangle_ops(block.index));
    }
    ops
}

/// Ordered blocks plus the entangled register realizing them.
#[derive(Debug, Clone)]
pub struct ChainState {
    encoding: PhaseEncoding,
    blocks: Vec<Block>,
    register: Option<StateVector<f64>>,
    enforce_budget: bool,
}

impl ChainState {
    pub fn new(encoding: PhaseEncoding) -> Self {
        Self {
            encoding,
            blocks: Vec::new(),
            register: None,
            enforce_budget: true,
        }
    }

    /// Construction mode without the chain-wide budget check, for
    /// reproducing published example chains whose phases exceed it.
    pub fn new_unchecked(encoding: PhaseEncoding) -> Self {
        Self {
            encoding,
            blocks: Vec::new(),
            register: None,
            enforce_budget: false,
        }
    }

    pub fn encoding(&self) -> &PhaseEncoding {
        &self.encoding
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The live register; `None` for an empty chain.
    pub fn register(&self) -> Option<&StateVector<f64>> {
        self.register.as_ref()
    }

    pub fn phases(&self) -> Vec<(f64, f64)> {
        self.blocks.iter().map(|b| (b.theta_a, b.theta_b)).collect()
    }

    /// Append a verified block: tensor its Bell pair onto the register and
    /// run the per-class entangling gates.
    pub fn append_block(&mut self, block: Block) -> Result<()> {
        if block.index != self.blocks.len() + 1 {
            return Err(Error::Ordering(format!(
                "expected block {}, got {}",
                self.blocks.len() + 1,
                block.index
            )));
        }
        if self.blocks.len() >= MAX_CHAIN_BLOCKS {
            return Err(Error::Capacity(format!(
                "chain is capped at {MAX_CHAIN_BLOCKS} blocks"
            )));
        }
        if self.enforce_budget {
            let mut phases = self.phases();
            phases.push((block.theta_a, block.theta_b));
            codec::ensure_budget(&phases)?;
        }
        block.check_rederivable(&self.encoding)?;

        let register = append_step(self.register.take(), &block)?;
        self.register = Some(register);
        self.blocks.push(block);
        Ok(())
    }

    /// Rebuild the register from the block records by replaying the
    /// append recipe in canonical order; bit-identical to the live register
    /// and across runs for the same records.
    pub fn closed_form(&self) -> Result<Option<StateVector<f64>>> {
        let mut register = None;
        for block in &self.blocks {
            register = Some(append_step(register, block)?);
        }
        Ok(register)
    }
}

/// One chain-growth step: fresh phased Bell pair tensored on, then the
/// per-class entangling gates of block m.
fn append_step(register: Option<StateVector<f64>>, block: &Block) -> Result<StateVector<f64>> {
    let mut pair = StateVector::new(2)?;
    pair.apply_all(&block_circuit_at(0, block.theta_a, block.theta_b))?;
    let mut register = match register {
        None => pair,
        Some(existing) => existing.tensor(&pair)?,
    };
    register.apply_all(&entangle_ops(block.index))?;
    Ok(register)
}

/// True when every amplitude outside the per-block {00, 11} support is
/// below 1e-12 in magnitude.
pub fn support_invariant_ok(state: &StateVector<f64>, n_blocks: usize) -> bool {
    debug_assert_eq!(state.n_qubits(), 2 * n_blocks);
    'outer: for (idx, amp) in state.amplitudes().iter().enumerate() {
        for m in 0..n_blocks {
            let pair = (idx >> (2 * m)) & 0b11;
            if pair == 0b01 || pair == 0b10 {
                if amp.norm() > 1e-12 {
                    return false;
                }
                continue 'outer;
            }
        }
    }
    true
}

// ── Chain log ────────────────────────────────────────────────────────────
//
// Append-only JSONL document. Line 1 is the header, every further line one
// block record:
//
//   {"schema":"qnft-chain-log","version":1,"encoding":{…}}
//   {"m":1,"owner_bits":"001","token_bits":"001","theta_a":…,"theta_b":…,
//    "verifier_outcomes":{"p0":"plus",…}}

pub const CHAIN_LOG_SCHEMA: &str = "qnft-chain-log";
pub const CHAIN_LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainLogHeader {
    pub schema: String,
    pub version: u32,
    pub encoding: PhaseEncoding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub m: usize,
    pub owner_bits: Option<String>,
    pub token_bits: Option<String>,
    pub theta_a: f64,
    pub theta_b: f64,
    /// Peer id → verification outcome label for the round that committed
    /// this block.
    pub verifier_outcomes: BTreeMap<String, String>,
}

/// Create a fresh chain log containing only the header.
pub fn init_chain_log(path: &Path, encoding: &PhaseEncoding) -> Result<()> {
    let header = ChainLogHeader {
        schema: CHAIN_LOG_SCHEMA.into(),
        version: CHAIN_LOG_VERSION,
        encoding: encoding.clone(),
    };
    let mut file = std::fs::File::create(path)?;
    writeln!(
        file,
        "{}",
        serde_json::to_string(&header).expect("header serializes")
    )?;
    Ok(())
}

/// Append one block record.
pub fn append_chain_log(path: &Path, record: &BlockRecord) -> Result<()> {
    let mut file = std::fs::OpenOptions::new().append(true).open(path)?;
    writeln!(
        file,
        "{}",
        serde_json::to_string(record).expect("record serializes")
    )?;
    Ok(())
}

/// Read a chain log back into its header and records.
pub fn read_chain_log(path: &Path) -> Result<(PhaseEncoding, Vec<BlockRecord>)> {
    let file = std::fs::File::open(path)?;
    let mut lines = std::io::BufReader::new(file).lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::ChainLog("empty chain log".into()))??;
    let header: ChainLogHeader = serde_json::from_str(&header_line)
        .map_err(|e| Error::ChainLog(format!("bad header: {e}")))?;
    if header.schema != CHAIN_LOG_SCHEMA {
        return Err(Error::ChainLog(format!(
            "unexpected schema '{}'",
            header.schema
        )));
    }
    if header.version != CHAIN_LOG_VERSION {
        return Err(Error::ChainLog(format!(
            "unsupported version {}",
            header.version
        )));
    }
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: BlockRecord =
            serde_json::from_str(&line).map_err(|e| Error::ChainLog(format!("bad record: {e}")))?;
        records.push(record);
    }
    Ok((header.encoding, records))
}

/// Rebuild a chain from its persisted records, re-deriving and checking
/// phases where classical records are present.
pub fn replay_chain(encoding: PhaseEncoding, records: &[BlockRecord]) -> Result<ChainState> {
    let mut chain = ChainState::new(encoding.clone());
    for record in records {
        let info = record
            .owner_bits
            .as_ref()
            .map(|bits| InfoPayload::new(bits.clone(), record.m));
        let token = match &record.token_bits {
            Some(bits) => Some(Token::from_bits(bits.clone(), &encoding)?),
            None => None,
        };
        let block = Block {
            index: record.m,
            theta_a: record.theta_a,
            theta_b: record.theta_b,
            info,
            token,
        };
        chain.append_block(block)?;
    }
    Ok(chain)
}
