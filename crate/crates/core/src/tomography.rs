//! Pauli state tomography: measurement settings, linear-inversion
//! reconstruction with PSD projection, depolarizing-noise calibration, and
//! city/Hinton plot-data exports.
//!
//! A full job covers all 3^n settings (X/Y/Z per qubit). Reconstruction is
//! ρ = (1/2^n) Σ_P ⟨P⟩·P over all 4^n Pauli strings, with identity
//! positions marginalized from every compatible setting; eigenvalue
//! clipping plus trace renormalization then yields the nearest PSD state.
//! Jobs are capped at 4 qubits (two blocks), matching the density-matrix
//! experiments this reproduces.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::{chain_circuit, Block};
use crate::report::{CalibrationReport, TomographyReport};
use crate::rng::derived_rng;
use crate::sim::{DensityMatrix, Gate, Pauli, PauliString, StateVector};

/// Tomography jobs are capped at 4 qubits (81 settings, 256 Pauli terms).
pub const MAX_TOMOGRAPHY_QUBITS: usize = 4;

/// One measurement setting: an X/Y/Z basis per qubit and a shot budget.
#[derive(Debug, Clone)]
pub struct TomographySetting {
    pub basis: PauliString,
    pub shots: u64,
}

/// Measured (or exact) outcome frequencies for one setting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SettingRecord {
    /// Basis text in ket order, e.g. "ZX".
    pub basis: String,
    /// Outcome index → frequency; length 2^n, sums to 1.
    pub frequencies: Vec<f64>,
}

fn check_measurement_basis(basis: &PauliString, n_qubits: usize) -> Result<()> {
    if basis.n_qubits() != n_qubits {
        return Err(Error::Tomography(format!(
            "setting on {} qubits, register has {n_qubits}",
            basis.n_qubits()
        )));
    }
    if basis.labels().contains(&Pauli::I) {
        return Err(Error::Tomography(
            "measurement settings use X/Y/Z only; identities are marginalized".into(),
        ));
    }
    Ok(())
}

/// All 3^n settings in a fixed order (qubit 0 cycles fastest through
/// X, Y, Z).
pub fn all_settings(n_qubits: usize) -> Vec<PauliString> {
    let mut settings = Vec::with_capacity(3usize.pow(n_qubits as u32));
    let total = 3usize.pow(n_qubits as u32);
    for code in 0..total {
        let mut labels = Vec::with_capacity(n_qubits);
        let mut rest = code;
        for _ in 0..n_qubits {
            labels.push(match rest % 3 {
                0 => Pauli::X,
                1 => Pauli::Y,
                _ => Pauli::Z,
            });
            rest /= 3;
        }
        settings.push(PauliString::new(labels));
    }
    settings
}

/// Exact Born probabilities of the computational outcomes after rotating
/// every qubit into its measurement basis (H for X, S†·H for Y).
pub fn setting_probabilities(rho: &DensityMatrix<f64>, basis: &PauliString) -> Result<Vec<f64>> {
    check_measurement_basis(basis, rho.n_qubits())?;
    let mut rotated = rho.clone();
    for q in 0..rho.n_qubits() {
        match basis.label(q) {
            Pauli::X => rotated.apply(Gate::H, &[q])?,
            Pauli::Y => {
                rotated.apply(Gate::Phase(-std::f64::consts::FRAC_PI_2), &[q])?;
                rotated.apply(Gate::H, &[q])?;
            }
            Pauli::Z => {}
            Pauli::I => unreachable!("validated above"),
        }
    }
    Ok((0..rotated.dim())
        .map(|i| rotated.get(i, i).re.max(0.0))
        .collect())
}

/// Sample outcome counts for one setting.
pub fn sample_setting<R: Rng + ?Sized>(
    rho: &DensityMatrix<f64>,
    setting: &TomographySetting,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let probs = setting_probabilities(rho, &setting.basis)?;
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0f64;
    for p in &probs {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..setting.shots {
        let u: f64 = rng.gen::<f64>() * total;
        let idx = cumulative.partition_point(|c| *c <= u).min(probs.len() - 1);
        counts[idx] += 1;
    }
    Ok(counts)
}

/// Run the full 3^n-setting job. `shots = 0` selects the infinite-shot
/// mode: frequencies are the exact Born probabilities. Each setting draws
/// from its own derived generator, so the set can be evaluated in any
/// order.
pub fn measure_all_settings(
    rho: &DensityMatrix<f64>,
    shots: u64,
    seed: u64,
) -> Result<Vec<SettingRecord>> {
    let n = rho.n_qubits();
    if n > MAX_TOMOGRAPHY_QUBITS {
        return Err(Error::Tomography(format!(
            "tomography is capped at {MAX_TOMOGRAPHY_QUBITS} qubits, got {n}"
        )));
    }
    let mut records = Vec::new();
    for (idx, basis) in all_settings(n).into_iter().enumerate() {
        let frequencies = if shots == 0 {
            setting_probabilities(rho, &basis)?
        } else {
            let mut rng = derived_rng(seed, idx as u64);
            let counts = sample_setting(
                rho,
                &TomographySetting {
                    basis: basis.clone(),
                    shots,
                },
                &mut rng,
            )?;
            counts.iter().map(|c| *c as f64 / shots as f64).collect()
        };
        records.push(SettingRecord {
            basis: basis.text(),
            frequencies,
        });
    }
    Ok(records)
}

/// Linear-inversion output: the raw matrix and its PSD projection.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub raw: DensityMatrix<f64>,
    pub rho: DensityMatrix<f64>,
    /// Negative eigenvalue mass removed by the projection.
    pub clipped_mass: f64,
}

/// Reconstruct a density matrix from complete setting coverage.
pub fn reconstruct(records: &[SettingRecord], n_qubits: usize) -> Result<Reconstruction> {
    if n_qubits == 0 || n_qubits > MAX_TOMOGRAPHY_QUBITS {
        return Err(Error::Tomography(format!(
            "tomography supports 1..={MAX_TOMOGRAPHY_QUBITS} qubits, got {n_qubits}"
        )));
    }
    let dim = 1usize << n_qubits;
    let expected = all_settings(n_qubits);
    let mut freq_by_basis = std::collections::BTreeMap::new();
    for record in records {
        if record.frequencies.len() != dim {
            return Err(Error::Tomography(format!(
                "setting {}: expected {dim} frequencies, got {}",
                record.basis,
                record.frequencies.len()
            )));
        }
        freq_by_basis.insert(record.basis.clone(), &record.frequencies);
    }
    for basis in &expected {
        if !freq_by_basis.contains_key(&basis.text()) {
            return Err(Error::Tomography(format!(
                "incomplete settings: missing {}",
                basis.text()
            )));
        }
    }

    // ⟨P⟩ for every Pauli string, averaged over compatible settings.
    let mut entries = vec![crate::scalar::c_zero::<f64>(); dim * dim];
    let scale = 1.0 / dim as f64;
    for code in 0..4usize.pow(n_qubits as u32) {
        let mut labels = Vec::with_capacity(n_qubits);
        let mut rest = code;
        for _ in 0..n_qubits {
            labels.push(match rest % 4 {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            });
            rest /= 4;
        }
        let pauli = PauliString::new(labels);
        let support = pauli.support();
        let est = if support.is_empty() {
            1.0
        } else {
            let support_mask: usize = support.iter().fold(0, |m, &q| m | (1 << q));
            let mut total = 0.0f64;
            let mut compatible = 0usize;
            for setting in &expected {
                if support.iter().any(|&q| setting.label(q) != pauli.label(q)) {
                    continue;
                }
                let freqs = freq_by_basis[&setting.text()];
                let mut e = 0.0f64;
                for (outcome, f) in freqs.iter().enumerate() {
                    let parity = (outcome & support_mask).count_ones() % 2;
                    e += if parity == 0 { *f } else { -*f };
                }
                total += e;
                compatible += 1;
            }
            total / compatible as f64
        };
        // Accumulate est·P/2^n into the matrix.
        let flip = pauli.flip_mask();
        for row in 0..dim {
            let col = row ^ flip;
            let mut val = num_complex::Complex64::new(est * scale, 0.0);
            for &q in &support {
                let rb = (row >> q) & 1;
                val *= match pauli.label(q) {
                    Pauli::X => num_complex::Complex64::new(1.0, 0.0),
                    Pauli::Y => {
                        if rb == 1 {
                            num_complex::Complex64::new(0.0, 1.0)
                        } else {
                            num_complex::Complex64::new(0.0, -1.0)
                        }
                    }
                    Pauli::Z => {
                        if rb == 1 {
                            num_complex::Complex64::new(-1.0, 0.0)
                        } else {
                            num_complex::Complex64::new(1.0, 0.0)
                        }
                    }
                    Pauli::I => unreachable!("identity positions are not in the support"),
                };
            }
            entries[row * dim + col] += val;
        }
    }

    let raw = DensityMatrix::from_entries(n_qubits, entries)?;
    let (rho, clipped_mass) = raw.project_psd();
    Ok(Reconstruction {
        raw,
        rho,
        clipped_mass,
    })
}

/// Replay the chain circuit on a density matrix, applying per-gate
/// depolarizing noise of strength `p` to every qubit a gate touches.
/// Statevector mode stays noiseless; this is the noisy counterpart.
pub fn noisy_chain_density(blocks: &[Block], p: f64) -> Result<DensityMatrix<f64>> {
    if blocks.is_empty() {
        return Err(Error::Tomography("empty chain".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!(
            "depolarizing probability {p} outside [0, 1]"
        )));
    }
    let mut rho = DensityMatrix::new(2 * blocks.len())?;
    for op in chain_circuit(blocks) {
        rho.apply_op(&op)?;
        if p > 0.0 {
            for &q in &op.targets {
                rho.apply_depolarizing(p, q)?;
            }
        }
    }
    Ok(rho)
}

/// The ideal (noiseless) chain state the tomography is compared against.
pub fn ideal_chain_state(blocks: &[Block]) -> Result<StateVector<f64>> {
    if blocks.is_empty() {
        return Err(Error::Tomography("empty chain".into()));
    }
    let mut state = StateVector::new(2 * blocks.len())?;
    state.apply_all(&chain_circuit(blocks))?;
    Ok(state)
}

/// Full tomography of a chain under depolarizing noise.
pub fn run_chain_tomography(
    blocks: &[Block],
    shots: u64,
    noise_p: f64,
    seed: u64,
) -> Result<(Reconstruction, TomographyReport)> {
    let n = 2 * blocks.len();
    if n > MAX_TOMOGRAPHY_QUBITS {
        return Err(Error::Tomography(format!(
            "chain tomography supports up to {} blocks, got {}",
            MAX_TOMOGRAPHY_QUBITS / 2,
            blocks.len()
        )));
    }
    let rho_true = noisy_chain_density(blocks, noise_p)?;
    let records = measure_all_settings(&rho_true, shots, seed)?;
    let recon = reconstruct(&records, n)?;
    let ideal = ideal_chain_state(blocks)?;
    let fidelity = recon.rho.fidelity_pure(&ideal)?;
    let report = TomographyReport {
        n_qubits: n,
        settings: records.len(),
        shots_per_setting: shots,
        noise_p,
        seed,
        fidelity_vs_ideal: fidelity,
    };
    Ok((recon, report))
}

fn mean_fidelity(blocks: &[Block], shots: u64, p: f64, seeds: &[u64]) -> Result<f64> {
    let mut total = 0.0f64;
    for &seed in seeds {
        let (_, report) = run_chain_tomography(blocks, shots, p, seed)?;
        total += report.fidelity_vs_ideal;
    }
    Ok(total / seeds.len() as f64)
}

/// Calibration band: the located p* must put the mean fidelity within
/// ±0.02 of the target.
pub const CALIBRATION_BAND: f64 = 0.02;

/// Bisect the per-gate depolarizing strength until the mean reconstructed
/// fidelity over the given seeds lands within the band around `target`.
/// The same seeds back every evaluation, so the fidelity trace is a smooth
/// function of p and its monotonicity is audited, not assumed.
pub fn calibrate_noise_to_fidelity(
    target: f64,
    blocks: &[Block],
    shots: u64,
    seeds: &[u64],
) -> Result<CalibrationReport> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::Parameter(format!(
            "target fidelity must be in (0, 1], got {target}"
        )));
    }
    if seeds.len() < 5 {
        return Err(Error::Parameter(format!(
            "calibration averages over at least 5 seeds, got {}",
            seeds.len()
        )));
    }
    let mut trace: Vec<(f64, f64)> = Vec::new();
    let f_zero = mean_fidelity(blocks, shots, 0.0, seeds)?;
    trace.push((0.0, f_zero));
    let finish = |p: f64, f: f64, trace: Vec<(f64, f64)>| -> Result<CalibrationReport> {
        audit_monotone(&trace)?;
        Ok(CalibrationReport {
            target_fidelity: target,
            p_star: p,
            achieved_fidelity: f,
            shots_per_setting: shots,
            seeds: seeds.to_vec(),
            trace,
        })
    };
    if (f_zero - target).abs() <= CALIBRATION_BAND {
        return finish(0.0, f_zero, trace);
    }
    if f_zero < target {
        return Err(Error::Calibration(format!(
            "target {target} above the noiseless fidelity {f_zero:.4}"
        )));
    }
    let mut lo = 0.0f64; // fidelity above target here
    let mut hi = 0.5f64;
    let f_hi = mean_fidelity(blocks, shots, hi, seeds)?;
    trace.push((hi, f_hi));
    if (f_hi - target).abs() <= CALIBRATION_BAND {
        return finish(hi, f_hi, trace);
    }
    if f_hi > target {
        return Err(Error::Calibration(format!(
            "target {target} below the fidelity {f_hi:.4} reached at p = 0.5"
        )));
    }
    for _ in 0..32 {
        let mid = 0.5 * (lo + hi);
        let f_mid = mean_fidelity(blocks, shots, mid, seeds)?;
        trace.push((mid, f_mid));
        if (f_mid - target).abs() <= CALIBRATION_BAND {
            return finish(mid, f_mid, trace);
        }
        if f_mid > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Calibration(format!(
        "bisection did not reach fidelity {target} ± {CALIBRATION_BAND}"
    )))
}

/// Fidelity must be non-increasing in p along the evaluated points.
fn audit_monotone(trace: &[(f64, f64)]) -> Result<()> {
    let mut sorted: Vec<(f64, f64)> = trace.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for pair in sorted.windows(2) {
        if pair[1].1 > pair[0].1 {
            return Err(Error::Calibration(format!(
                "fidelity not monotone in p: f({}) = {} < f({}) = {}",
                pair[0].0, pair[0].1, pair[1].0, pair[1].1
            )));
        }
    }
    Ok(())
}

// ── Plot-data exports ────────────────────────────────────────────────────

/// City plot data: labeled real and imaginary parts as full matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CityPlotData {
    pub n_qubits: usize,
    pub dim: usize,
    /// Basis labels in ket order (qubit n−1 leftmost), row/column order.
    pub labels: Vec<String>,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

/// One Hinton cell: |value| and its sign, per matrix part.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HintonCell {
    pub row: usize,
    pub col: usize,
    pub magnitude: f64,
    /// −1, 0, or 1.
    pub sign: i8,
}

/// Hinton plot data: signed magnitudes for both parts, 2^n × 2^n cells
/// each.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HintonPlotData {
    pub n_qubits: usize,
    pub dim: usize,
    pub real: Vec<HintonCell>,
    pub imag: Vec<HintonCell>,
}

fn basis_label(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .rev()
        .map(|q| if index & (1 << q) != 0 { '1' } else { '0' })
        .collect()
}

pub fn export_city(rho: &DensityMatrix<f64>) -> CityPlotData {
    let dim = rho.dim();
    let labels = (0..dim).map(|i| basis_label(i, rho.n_qubits())).collect();
    let mut real = vec![vec![0.0f64; dim]; dim];
    let mut imag = vec![vec![0.0f64; dim]; dim];
    for r in 0..dim {
        for c in 0..dim {
            real[r][c] = rho.get(r, c).re;
            imag[r][c] = rho.get(r, c).im;
        }
    }
    CityPlotData {
        n_qubits: rho.n_qubits(),
        dim,
        labels,
        real,
        imag,
    }
}

pub fn export_hinton(rho: &DensityMatrix<f64>) -> HintonPlotData {
    let dim = rho.dim();
    let cell = |v: f64, row: usize, col: usize| HintonCell {
        row,
        col,
        magnitude: v.abs(),
        sign: if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        },
    };
    let mut real = Vec::with_capacity(dim * dim);
    let mut imag = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for c in 0..dim {
            let v = rho.get(r, c);
            real.push(cell(v.re, r, c));
            imag.push(cell(v.im, r, c));
        }
    }
    HintonPlotData {
        n_qubits: rho.n_qubits(),
        dim,
        real,
        imag,
    }
}
