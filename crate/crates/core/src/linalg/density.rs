use num_complex::Complex64;
use rand::Rng;

use super::eigen::{eig_hermitian, HermitianEigen};
use super::matrix::ComplexMatrix;
use super::random::sample_random_density;
use super::LinalgError;

const HERMITICITY_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-9;
const EIGENVALUE_FLOOR: f64 = -1e-9;

/// A validated quantum state: Hermitian, positive semidefinite, unit trace.
/// Construction symmetrizes the input so downstream eigendecompositions see
/// an exactly Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, LinalgError> {
        if !matrix.is_square() {
            return Err(LinalgError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        if !matrix.is_hermitian(HERMITICITY_TOL) {
            return Err(LinalgError::NotHermitian {
                deviation: matrix.hermiticity_deviation() / matrix.frobenius_norm().max(1e-300),
            });
        }
        let matrix = matrix.hermitized();
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(LinalgError::NonUnitTrace { trace });
        }
        let eigen = eig_hermitian(&matrix, HERMITICITY_TOL)?;
        let min = eigen.min_eigenvalue();
        if min < EIGENVALUE_FLOOR {
            return Err(LinalgError::NegativeEigenvalue { value: min });
        }
        Ok(Self { matrix })
    }

    /// Diagonal state from a probability vector.
    pub fn from_diag(probs: &[f64]) -> Result<Self, LinalgError> {
        Self::new(ComplexMatrix::from_real_diag(probs))
    }

    /// Rank-one projector |ψ⟩⟨ψ| from (unnormalized) amplitudes.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self, LinalgError> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(LinalgError::NonUnitTrace { trace: 0.0 });
        }
        let d = amplitudes.len();
        let m = ComplexMatrix::from_fn(d, d, |r, c| {
            amplitudes[r] * amplitudes[c].conj() / (norm * norm)
        });
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    /// Draw from the Ginibre-induced measure; full-rank almost surely.
    pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        Self {
            matrix: sample_random_density(dim, rng),
        }
    }

    /// Ginibre draw, resampled until every eigenvalue clears `floor`.
    /// Used for reference states that must be numerically invertible.
    pub fn ginibre_full_rank<R: Rng + ?Sized>(dim: usize, rng: &mut R, floor: f64) -> Self {
        loop {
            let rho = Self::ginibre(dim, rng);
            if rho.min_eigenvalue() > floor {
                return rho;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigen(&self) -> HermitianEigen {
        eig_hermitian(&self.matrix, HERMITICITY_TOL).expect("validated state must decompose")
    }

    /// Eigenvalues sorted non-increasing.
    pub fn eigenvalues_desc(&self) -> Vec<f64> {
        self.eigen().eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().min_eigenvalue()
    }

    /// UρU†. The caller supplies a unitary; the result is symmetrized but
    /// not re-validated.
    pub fn conjugated_by(&self, u: &ComplexMatrix) -> Self {
        Self {
            matrix: self.matrix.conjugated_by(u).hermitized(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_invalid_states() {
        assert!(DensityMatrix::from_diag(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::from_diag(&[1.5, -0.5]).is_err());
        let skew = ComplexMatrix::from_real_rows(&[vec![0.5, 0.4], vec![-0.4, 0.5]]);
        assert!(DensityMatrix::new(skew).is_err());
    }

    #[test]
    fn pure_state_normalizes() {
        let plus =
            DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        assert!((plus.matrix().get(0, 1).re - 0.5).abs() <= 1e-12);
        let eigs = plus.eigenvalues_desc();
        assert!((eigs[0] - 1.0).abs() <= 1e-12 && eigs[1].abs() <= 1e-12);
    }

    #[test]
    fn conjugation_preserves_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rho = DensityMatrix::ginibre(4, &mut rng);
        let u = crate::linalg::sample_haar_unitary(4, &mut rng);
        let rotated = rho.conjugated_by(&u);
        let a = rho.eigenvalues_desc();
        let b = rotated.eigenvalues_desc();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn full_rank_draw_clears_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let sigma = DensityMatrix::ginibre_full_rank(4, &mut rng, 1e-6);
        assert!(sigma.min_eigenvalue() > 1e-6);
    }
}
