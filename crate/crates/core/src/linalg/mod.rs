//! Minimal dense complex linear algebra for operators on Hilbert spaces of
//! dimension ≤ 8: Hermitian eigendecomposition, log₂ matrix function,
//! Kronecker products, partial traces, and random-matrix sampling.

mod density;
mod eigen;
mod matrix;
mod random;

pub use density::DensityMatrix;
pub use eigen::{eig_hermitian, HermitianEigen};
pub use matrix::ComplexMatrix;
pub use random::{sample_ginibre, sample_haar_unitary, sample_random_density};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is singular or not positive definite (eigenvalue {eigenvalue:.3e})")]
    Singular { eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("trace is {trace}, expected 1")]
    NonUnitTrace { trace: f64 },
    #[error("state has negative eigenvalue {value:.3e}")]
    NegativeEigenvalue { value: f64 },
}

/// Which tensor factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// V · diag(log₂ λ) · V† for Hermitian positive-definite input. Eigenvalues
/// at or below `eigen_tol` are rejected; rank-deficient operators have no
/// logarithm on the full space.
pub fn matrix_log2(m: &ComplexMatrix, eigen_tol: f64) -> Result<ComplexMatrix, LinalgError> {
    let eigen = eig_hermitian(m, 1e-9)?;
    let min = eigen.min_eigenvalue();
    if min <= eigen_tol {
        return Err(LinalgError::Singular { eigenvalue: min });
    }
    let logs: Vec<f64> = eigen.eigenvalues.iter().map(|l| l.log2()).collect();
    let d = ComplexMatrix::from_real_diag(&logs);
    Ok(eigen
        .eigenvectors
        .matmul(&d)
        .matmul(&eigen.eigenvectors.adjoint()))
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = (a.rows(), a.cols());
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |r, c| {
        a.get(r / br, c / bc) * b.get(r % br, c % bc)
    })
}

/// Partial trace of an operator on a dim_a ⊗ dim_b space, keeping the
/// selected factor. Basis ordering is |a⟩⊗|b⟩ ↦ index a·dim_b + b.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix, LinalgError> {
    let expected = dim_a * dim_b;
    if m.rows() != expected || m.cols() != expected {
        return Err(LinalgError::DimensionMismatch {
            expected,
            actual: m.rows(),
        });
    }
    let out = match keep {
        Subsystem::A => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b)
                .map(|k| m.get(i * dim_b + k, j * dim_b + k))
                .sum::<Complex64>()
        }),
        Subsystem::B => ComplexMatrix::from_fn(dim_b, dim_b, |k, l| {
            (0..dim_a)
                .map(|i| m.get(i * dim_b + k, i * dim_b + l))
                .sum::<Complex64>()
        }),
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log2_of_identity_is_zero() {
        let l = matrix_log2(&ComplexMatrix::identity(3), 1e-12).unwrap();
        assert!(l.frobenius_norm() <= 1e-12);
    }

    #[test]
    fn log2_of_diagonals() {
        let l = matrix_log2(&ComplexMatrix::from_real_diag(&[0.5, 0.5]), 1e-12).unwrap();
        assert!(l.max_abs_diff(&ComplexMatrix::from_real_diag(&[-1.0, -1.0])) <= 1e-12);
        let l = matrix_log2(&ComplexMatrix::from_real_diag(&[4.0, 2.0]), 1e-12).unwrap();
        assert!(l.max_abs_diff(&ComplexMatrix::from_real_diag(&[2.0, 1.0])) <= 1e-12);
    }

    #[test]
    fn log2_rejects_singular_input() {
        let m = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert!(matches!(
            matrix_log2(&m, 1e-12),
            Err(LinalgError::Singular { .. })
        ));
    }

    #[test]
    fn log2_commutes_with_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let g = sample_ginibre(4, 4, &mut rng);
            // Shifted Gram matrix: Hermitian and comfortably positive definite.
            let m = g
                .matmul(&g.adjoint())
                .add(&ComplexMatrix::identity(4).scale_re(0.5))
                .hermitized();
            let l = matrix_log2(&m, 1e-12).unwrap();
            let comm = ComplexMatrix::commutator(&m, &l).frobenius_norm();
            assert!(comm <= 1e-10 * m.frobenius_norm().max(1.0), "comm {comm}");
        }
    }

    #[test]
    fn kron_of_identities() {
        let k = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert!(k.max_abs_diff(&ComplexMatrix::identity(4)) == 0.0);
    }

    #[test]
    fn kron_of_projectors() {
        let p = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let k = kron(&p, &p);
        assert!(k.max_abs_diff(&ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0])) == 0.0);
    }

    #[test]
    fn kron_pauli_x_with_identity() {
        // Direct index expansion: ones at (0,2),(1,3),(2,0),(3,1).
        let x = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let k = kron(&x, &ComplexMatrix::identity(2));
        for r in 0..4 {
            for col in 0..4 {
                let expected = matches!((r, col), (0, 2) | (1, 3) | (2, 0) | (3, 1));
                let v = k.get(r, col);
                if expected {
                    assert_eq!(v, c(1.0, 0.0));
                } else {
                    assert_eq!(v, c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn partial_trace_of_bell_projector() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let bell =
            DensityMatrix::pure(&[c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(inv, 0.0)]).unwrap();
        let a = partial_trace(bell.matrix(), 2, 2, Subsystem::A).unwrap();
        assert!(a.max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5)) <= 1e-12);
    }

    #[test]
    fn partial_trace_of_diagonal() {
        let m = ComplexMatrix::from_real_diag(&[0.4, 0.3, 0.2, 0.1]);
        let a = partial_trace(&m, 2, 2, Subsystem::A).unwrap();
        let b = partial_trace(&m, 2, 2, Subsystem::B).unwrap();
        assert!(a.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.7, 0.3])) <= 1e-12);
        assert!(b.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.6, 0.4])) <= 1e-12);
    }

    #[test]
    fn partial_trace_factorizes_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..100 {
            let a = sample_random_density(2, &mut rng);
            let b = sample_random_density(2, &mut rng);
            let joint = kron(&a, &b);
            let ra = partial_trace(&joint, 2, 2, Subsystem::A).unwrap();
            let rb = partial_trace(&joint, 2, 2, Subsystem::B).unwrap();
            // Tr_B(a ⊗ b) = a · Tr(b), and both factors have unit trace.
            assert!(ra.max_abs_diff(&a) <= 1e-12);
            assert!(rb.max_abs_diff(&b) <= 1e-12);
            let total = partial_trace(&joint, 2, 2, Subsystem::A)
                .unwrap()
                .trace()
                .re;
            assert!((total - joint.trace().re).abs() <= 1e-12);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = ComplexMatrix::identity(3);
        assert!(matches!(
            partial_trace(&m, 2, 2, Subsystem::A),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }
}
