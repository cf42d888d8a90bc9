//! Strided gate kernels shared by the state-vector and density-matrix
//! representations. All operate on a raw amplitude slice of power-of-two
//! length with qubit 0 as the least-significant index bit.

use crate::scalar::{c_zero, phase_factor, Amplitude, Scalar};

pub(crate) fn hadamard<S: Scalar>(amps: &mut [Amplitude<S>], qubit: usize) {
    let mask = 1usize << qubit;
    let inv_sqrt2 = S::one() / S::SQRT_2();
    for i in 0..amps.len() {
        if i & mask == 0 {
            let a = amps[i];
            let b = amps[i | mask];
            amps[i] = (a + b).scale(inv_sqrt2);
            amps[i | mask] = (a - b).scale(inv_sqrt2);
        }
    }
}

pub(crate) fn pauli_x<S: Scalar>(amps: &mut [Amplitude<S>], qubit: usize) {
    let mask = 1usize << qubit;
    for i in 0..amps.len() {
        if i & mask == 0 {
            amps.swap(i, i | mask);
        }
    }
}

/// e^{iθ} on every index with all `mask` bits set.
pub(crate) fn phase_masked<S: Scalar>(amps: &mut [Amplitude<S>], mask: usize, theta: S) {
    let factor = phase_factor(theta);
    for (i, amp) in amps.iter_mut().enumerate() {
        if i & mask == mask {
            *amp *= factor;
        }
    }
}

pub(crate) fn cnot<S: Scalar>(amps: &mut [Amplitude<S>], control: usize, target: usize) {
    let c = 1usize << control;
    let t = 1usize << target;
    for i in 0..amps.len() {
        if i & c != 0 && i & t == 0 {
            amps.swap(i, i | t);
        }
    }
}

pub(crate) fn swap<S: Scalar>(
    amps: &mut [Amplitude<S>],
    a: usize,
    b: usize,
    control: Option<usize>,
) {
    let am = 1usize << a;
    let bm = 1usize << b;
    let cm = control.map_or(0, |c| 1usize << c);
    for i in 0..amps.len() {
        if i & cm == cm && i & am != 0 && i & bm == 0 {
            amps.swap(i, i ^ am ^ bm);
        }
    }
}

/// Dense k-qubit unitary; local basis bit j corresponds to `targets[j]`.
pub(crate) fn dense_unitary<S: Scalar>(
    amps: &mut [Amplitude<S>],
    matrix: &[Amplitude<S>],
    targets: &[usize],
) {
    let k = targets.len();
    let dim = 1usize << k;
    debug_assert_eq!(matrix.len(), dim * dim);
    let spread: Vec<usize> = (0..dim)
        .map(|local| {
            let mut idx = 0usize;
            for (j, &t) in targets.iter().enumerate() {
                if local & (1 << j) != 0 {
                    idx |= 1 << t;
                }
            }
            idx
        })
        .collect();
    let target_mask = targets.iter().fold(0usize, |m, &t| m | (1 << t));
    let mut scratch = vec![c_zero::<S>(); dim];
    for base in 0..amps.len() {
        if base & target_mask != 0 {
            continue;
        }
        for (l, s) in spread.iter().enumerate() {
            scratch[l] = amps[base | s];
        }
        for (r, s) in spread.iter().enumerate() {
            let mut acc = c_zero::<S>();
            for (c, v) in scratch.iter().enumerate() {
                acc += matrix[r * dim + c] * *v;
            }
            amps[base | s] = acc;
        }
    }
}
