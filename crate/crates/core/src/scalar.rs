//! Scalar abstraction for the quantum-math core.
//!
//! Every state-vector and density-matrix routine is generic over a real
//! scalar implementing [`Scalar`]; `f64` backs the concrete aliases at the
//! crate root and is what the protocol layers use. `f32` is supported for
//! experimentation where the memory halving matters more than the last
//! digits.

use num_complex::Complex;

/// Real scalar backing complex amplitudes: `f32` or `f64`.
pub trait Scalar:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssign
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossless for f64; rounds for f32.
    fn from_f64_lossy(value: f64) -> Self;

    /// Widen to f64 for probability sampling and reporting.
    fn to_f64_lossy(self) -> f64;
}

impl Scalar for f32 {
    fn from_f64_lossy(value: f64) -> Self {
        value as f32
    }

    fn to_f64_lossy(self) -> f64 {
        f64::from(self)
    }
}

impl Scalar for f64 {
    fn from_f64_lossy(value: f64) -> Self {
        value
    }

    fn to_f64_lossy(self) -> f64 {
        self
    }
}

/// Complex amplitude over the chosen scalar.
pub type Amplitude<S> = Complex<S>;

pub fn c_zero<S: Scalar>() -> Amplitude<S> {
    Complex::new(S::zero(), S::zero())
}

pub fn c_one<S: Scalar>() -> Amplitude<S> {
    Complex::new(S::one(), S::zero())
}

/// e^{iθ} as a complex amplitude.
pub fn phase_factor<S: Scalar>(theta: S) -> Amplitude<S> {
    Complex::new(theta.cos(), theta.sin())
}
