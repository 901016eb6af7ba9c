//! Random-matrix ensembles: complex Ginibre, Haar unitaries, and the
//! induced density-matrix measure GG†/Tr(GG†).

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::ComplexMatrix;

/// Matrix with independent standard complex Gaussian entries.
pub fn sample_ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix, with the Q columns
/// rescaled by the phases of R's diagonal. Without that correction the
/// Householder phase convention biases the distribution.
pub fn sample_haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    assert!(dim >= 1, "dimension must be positive");
    let g = sample_ginibre(dim, dim, rng);
    let (q, r) = householder_qr(&g);
    let mut u = q;
    for j in 0..dim {
        let rjj = r.get(j, j);
        let mag = rjj.norm();
        let phase = if mag > 0.0 {
            rjj / mag
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            let v = u.get(i, j) * phase;
            u.set(i, j, v);
        }
    }
    u
}

/// Ginibre-induced random density matrix GG†/Tr(GG†): Hermitian, PSD,
/// unit trace, and full-rank almost surely.
pub fn sample_random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    assert!(dim >= 1, "dimension must be positive");
    let g = sample_ginibre(dim, dim, rng);
    let gram = g.matmul(&g.adjoint()).hermitized();
    let trace = gram.trace().re;
    gram.scale_re(1.0 / trace)
}

/// Householder QR for square complex matrices.
fn householder_qr(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = m.rows();
    let mut r = m.clone();
    let mut q = ComplexMatrix::identity(n);

    for k in 0..n {
        // Column k below (and including) the diagonal.
        let mut x = vec![Complex64::new(0.0, 0.0); n - k];
        for i in k..n {
            x[i - k] = r.get(i, k);
        }
        let norm_x = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_x < 1e-300 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        // Reflect x onto alpha·e1 with alpha = −phase(x0)·‖x‖.
        let alpha = -phase * norm_x;
        let mut v = x;
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq < 1e-300 {
            continue;
        }

        // r ← H r, with H = I − 2 v v† / (v† v) acting on rows k..n.
        for j in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in k..n {
                dot += v[i - k].conj() * r.get(i, j);
            }
            let coeff = dot * (2.0 / vnorm_sq);
            for i in k..n {
                let val = r.get(i, j) - coeff * v[i - k];
                r.set(i, j, val);
            }
        }
        // q ← q H (accumulating Q = H_1 H_2 ⋯).
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for j in k..n {
                dot += q.get(i, j) * v[j - k];
            }
            let coeff = dot * (2.0 / vnorm_sq);
            for j in k..n {
                let val = q.get(i, j) - coeff * v[j - k].conj();
                q.set(i, j, val);
            }
        }
    }
    (q, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qr_reconstructs_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in [1, 2, 5, 8] {
            let g = sample_ginibre(dim, dim, &mut rng);
            let (q, r) = householder_qr(&g);
            assert!(q.unitary_deviation() <= 1e-12, "Q not unitary at dim {dim}");
            assert!(q.matmul(&r).max_abs_diff(&g) <= 1e-10);
            for i in 0..dim {
                for j in 0..i {
                    assert!(r.get(i, j).norm() <= 1e-10, "R not triangular");
                }
            }
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for dim in [1, 2, 3, 4, 8] {
            let u = sample_haar_unitary(dim, &mut rng);
            assert!(u.unitary_deviation() <= 1e-10);
        }
    }

    #[test]
    fn haar_dim_one_is_unit_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = sample_haar_unitary(1, &mut rng);
        assert!((u.get(0, 0).norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn haar_moments_match() {
        // E|U_00|² = 1/d and E[Tr U] = 0 for the Haar measure; both are
        // sensitive to a missing diagonal-phase correction.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 100_000;
        let mut moment = 0.0;
        let mut tr = Complex64::new(0.0, 0.0);
        for _ in 0..n {
            let u = sample_haar_unitary(4, &mut rng);
            moment += u.get(0, 0).norm_sqr();
            tr += u.trace();
        }
        moment /= n as f64;
        tr /= n as f64;
        assert!((moment - 0.25).abs() <= 0.01, "moment {moment}");
        assert!(
            tr.re.abs() <= 0.02 && tr.im.abs() <= 0.02,
            "mean trace {tr}"
        );
    }

    #[test]
    fn density_sample_is_a_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let rho = sample_random_density(4, &mut rng);
            assert!((rho.trace().re - 1.0).abs() <= 1e-12);
            assert!(rho.is_hermitian(1e-12));
            let e = crate::linalg::eig_hermitian(&rho, 1e-12).unwrap();
            assert!(e.min_eigenvalue() >= -1e-12);
        }
        let one = sample_random_density(1, &mut rng);
        assert!((one.get(0, 0) - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
    }
}
