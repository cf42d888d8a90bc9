//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Desk-scale density matrices top out at 256×256, where Jacobi sweeps
//! converge in a handful of iterations and keep the eigenvector basis
//! orthonormal by construction.

use crate::scalar::{c_one, c_zero, Amplitude, Scalar};

/// Eigen decomposition A = V Λ V† of a Hermitian matrix.
///
/// `values[k]` pairs with the column k of `vectors` (row-major,
/// `vectors[r * dim + k]` = component r of eigenvector k). Eigenvalues are
/// returned in ascending order.
pub struct HermitianEigen<S: Scalar> {
    pub dim: usize,
    pub values: Vec<S>,
    pub vectors: Vec<Amplitude<S>>,
}

const MAX_SWEEPS: usize = 64;

pub fn eigh<S: Scalar>(matrix: &[Amplitude<S>], dim: usize) -> HermitianEigen<S> {
    assert_eq!(matrix.len(), dim * dim, "matrix shape mismatch");
    let mut a = matrix.to_vec();
    let mut v = vec![c_zero::<S>(); dim * dim];
    for k in 0..dim {
        v[k * dim + k] = c_one();
    }

    let fro_sqr: S = a.iter().map(|x| x.norm_sqr()).sum();
    let tol = fro_sqr * S::epsilon() * S::epsilon() * S::from_f64_lossy((dim * dim) as f64);

    for _ in 0..MAX_SWEEPS {
        let off_sqr: S = off_diagonal_sqr(&a, dim);
        if off_sqr <= tol || off_sqr == S::zero() {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                rotate(&mut a, &mut v, dim, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..dim).collect();
    let diag: Vec<S> = (0..dim).map(|k| a[k * dim + k].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let values: Vec<S> = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = vec![c_zero::<S>(); dim * dim];
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..dim {
            vectors[r * dim + new_col] = v[r * dim + old_col];
        }
    }
    HermitianEigen {
        dim,
        values,
        vectors,
    }
}

fn off_diagonal_sqr<S: Scalar>(a: &[Amplitude<S>], dim: usize) -> S {
    let mut acc = S::zero();
    for r in 0..dim {
        for c in 0..dim {
            if r != c {
                acc += a[r * dim + c].norm_sqr();
            }
        }
    }
    acc
}

/// One complex Jacobi rotation zeroing A[p][q].
fn rotate<S: Scalar>(
    a: &mut [Amplitude<S>],
    v: &mut [Amplitude<S>],
    dim: usize,
    p: usize,
    q: usize,
) {
    let apq = a[p * dim + q];
    let norm = apq.norm();
    if norm <= S::epsilon() {
        return;
    }
    let app = a[p * dim + p].re;
    let aqq = a[q * dim + q].re;
    // Unitary block [[c, -s·e^{iβ}], [s·e^{-iβ}, c]] with β = arg(A_pq).
    let beta_phase = apq.unscale(norm); // e^{iβ}
    let tau = (app - aqq) / (norm + norm);
    let t = {
        let sign = if tau >= S::zero() {
            S::one()
        } else {
            -S::one()
        };
        sign / (tau.abs() + (S::one() + tau * tau).sqrt())
    };
    let c = S::one() / (S::one() + t * t).sqrt();
    let s = t * c;

    let u_pp = Amplitude::new(c, S::zero());
    let u_pq = -beta_phase.scale(s);
    let u_qp = beta_phase.conj().scale(s);
    let u_qq = Amplitude::new(c, S::zero());

    // A ← U† A (rows p, q).
    for r in 0..dim {
        let ap = a[p * dim + r];
        let aq = a[q * dim + r];
        a[p * dim + r] = u_pp.conj() * ap + u_qp.conj() * aq;
        a[q * dim + r] = u_pq.conj() * ap + u_qq.conj() * aq;
    }
    // A ← A U and V ← V U (columns p, q).
    for r in 0..dim {
        let ap = a[r * dim + p];
        let aq = a[r * dim + q];
        a[r * dim + p] = ap * u_pp + aq * u_qp;
        a[r * dim + q] = ap * u_pq + aq * u_qq;
        let vp = v[r * dim + p];
        let vq = v[r * dim + q];
        v[r * dim + p] = vp * u_pp + vq * u_qp;
        v[r * dim + q] = vp * u_pq + vq * u_qq;
    }
    // The rotation zeroes the pivot analytically; pin it against rounding.
    a[p * dim + q] = c_zero();
    a[q * dim + p] = c_zero();
}
