//! Noise channels for density-matrix simulation.

use crate::error::{Error, Result};
use crate::scalar::{c_zero, Amplitude, Scalar};
use crate::sim::density::DensityMatrix;

/// Single-qubit depolarizing channel
/// ρ → (1−p)ρ + (p/3)(XρX + YρY + ZρZ), fully mixing at p = 3/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseChannel<S: Scalar> {
    p: S,
}

impl<S: Scalar> NoiseChannel<S> {
    pub fn depolarizing(p: S) -> Result<Self> {
        let pf = p.to_f64_lossy();
        if !(0.0..=1.0).contains(&pf) {
            return Err(Error::Parameter(format!(
                "depolarizing probability {pf} outside [0, 1]"
            )));
        }
        Ok(Self { p })
    }

    pub fn probability(&self) -> S {
        self.p
    }

    /// The four Kraus operators (2×2, row-major):
    /// √(1−p)·I, √(p/3)·X, √(p/3)·Y, √(p/3)·Z. They satisfy Σ K†K = I.
    pub fn kraus_operators(&self) -> Vec<[Amplitude<S>; 4]> {
        let keep = (S::one() - self.p).sqrt();
        let third = (self.p / S::from_f64_lossy(3.0)).sqrt();
        let zero = c_zero::<S>();
        let re = |x: S| Amplitude::new(x, S::zero());
        let im = |x: S| Amplitude::new(S::zero(), x);
        vec![
            [re(keep), zero, zero, re(keep)],
            [zero, re(third), re(third), zero],
            [zero, im(-third), im(third), zero],
            [re(third), zero, zero, re(-third)],
        ]
    }

    /// Apply the channel to one qubit of a density matrix.
    pub fn apply(&self, rho: &mut DensityMatrix<S>, target: usize) -> Result<()> {
        rho.apply_depolarizing(self.p, target)
    }
}
