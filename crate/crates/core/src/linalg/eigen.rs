//! Hermitian eigendecomposition via cyclic Jacobi rotations.
//!
//! Each rotation zeroes one off-diagonal pair (p, q): the complex phase of
//! a_pq is absorbed into the rotation so the 2×2 subproblem reduces to the
//! real symmetric case. Quadratic convergence sets in after a couple of
//! sweeps; for the dimensions handled here (≤ 8) the whole decomposition is
//! a few microseconds.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::LinalgError;

/// Sweep cap; Jacobi on an 8×8 Hermitian matrix converges in well under ten.
const SWEEP_LIMIT: usize = 100;

/// Convergence: off-diagonal Frobenius norm relative to the input norm.
const OFF_DIAG_TOL: f64 = 1e-14;

/// Eigenvalues sorted non-increasing, with eigenvector columns in matching
/// order. `V · diag(λ) · V†` reconstructs the input.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// V · diag(λ) · V†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_real_diag(&self.eigenvalues);
        self.eigenvectors
            .matmul(&d)
            .matmul(&self.eigenvectors.adjoint())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self
            .eigenvalues
            .last()
            .expect("eigendecomposition of empty matrix")
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc += a.get(r, c).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Decompose a Hermitian matrix. The input is checked against `tol`
/// (relative ‖m − m†‖_F) and symmetrized before iteration, so round-off
/// drift on nominally Hermitian input does not leak into the result.
pub fn eig_hermitian(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let norm = m.frobenius_norm();
    if norm > 0.0 {
        let deviation = m.hermiticity_deviation() / norm;
        if deviation > tol {
            return Err(LinalgError::NotHermitian { deviation });
        }
    }

    let n = m.rows();
    let mut a = m.hermitized();
    let mut v = ComplexMatrix::identity(n);

    if norm > 0.0 {
        let target = OFF_DIAG_TOL * norm;
        for _sweep in 0..SWEEP_LIMIT {
            if off_diagonal_norm(&a) <= target {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    // Diagonal of the converged iterate, forced real.
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("NaN eigenvalue"));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));

    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation annihilating a[p][q] (and a[q][p]).
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let z = a.get(p, q);
    let r = z.norm();
    if r < 1e-300 {
        return;
    }
    let phase = z / r;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (2.0 * r);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.rows();
    // Right-multiply by the rotation: columns p and q.
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, phase * akp * c - akq * s);
        a.set(k, q, phase * akp * s + akq * c);
    }
    // Left-multiply by its adjoint: rows p and q.
    let phase_conj = phase.conj();
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, phase_conj * apk * c - aqk * s);
        a.set(q, k, phase_conj * apk * s + aqk * c);
    }
    // The rotation is constructed to zero this pair exactly.
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    let dpp = a.get(p, p).re;
    let dqq = a.get(q, q).re;
    a.set(p, p, Complex64::new(dpp, 0.0));
    a.set(q, q, Complex64::new(dqq, 0.0));

    // Accumulate the eigenvector basis.
    for k in 0..v.rows() {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, phase * vkp * c - vkq * s);
        v.set(k, q, phase * vkp * s + vkq * c);
    }
}
