//! Classical and quantum entropy functionals, all in bits (base-2 logs).
//!
//! Conventions are explicit: x·log₂x := 0 at x = 0, and relative entropies
//! are +∞ exactly when the support condition fails. Tiny negative results
//! from floating-point cancellation (within −1e-10) are clamped to zero and
//! counted in a process-wide diagnostics tally.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::DensityMatrix;

/// Eigenvalues at or below this are treated as exact zeros when comparing
/// supports.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-12;

/// Results in [−NEGATIVE_CLAMP, 0) are round-off; clamp and tally.
const NEGATIVE_CLAMP: f64 = 1e-10;

static NEGATIVE_CLAMPS: AtomicU64 = AtomicU64::new(0);

/// Number of relative-entropy evaluations whose small negative result was
/// clamped to zero since process start.
pub fn negative_clamp_count() -> u64 {
    NEGATIVE_CLAMPS.load(Ordering::Relaxed)
}

#[derive(Debug, Error, PartialEq)]
pub enum EntropyError {
    #[error("spectra have different dimensions: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("negative probability {0}")]
    NegativeProbability(f64),
}

/// A probability vector; entries stay in insertion order, with sorted views
/// on demand. The universal currency of the classical formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    probs: Vec<f64>,
}

impl Spectrum {
    /// Validate and store. Entries in [−1e-12, 0) are clamped to zero;
    /// anything more negative is rejected, as is a sum off 1 by > 1e-10.
    pub fn new(mut probs: Vec<f64>) -> Result<Self, EntropyError> {
        for p in &mut probs {
            if *p < 0.0 {
                if *p < -1e-12 {
                    return Err(EntropyError::NegativeProbability(*p));
                }
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(EntropyError::NotNormalized(sum));
        }
        Ok(Self { probs })
    }

    pub fn uniform(dim: usize) -> Self {
        Self {
            probs: vec![1.0 / dim as f64; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// λ↓: entries in non-increasing order.
    pub fn sorted_desc(&self) -> Spectrum {
        let mut p = self.probs.clone();
        p.sort_by(|a, b| b.partial_cmp(a).expect("NaN probability"));
        Spectrum { probs: p }
    }

    /// λ↑: entries in non-decreasing order.
    pub fn sorted_asc(&self) -> Spectrum {
        let mut p = self.probs.clone();
        p.sort_by(|a, b| a.partial_cmp(b).expect("NaN probability"));
        Spectrum { probs: p }
    }

    pub fn min(&self) -> f64 {
        self.probs.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Relative entropy with the support-violation branch kept distinct from
/// any finite value, so aggregation can count violations separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RelEntropy {
    Finite(f64),
    Infinite,
}

impl RelEntropy {
    pub fn is_infinite(&self) -> bool {
        matches!(self, RelEntropy::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            RelEntropy::Finite(v) => Some(*v),
            RelEntropy::Infinite => None,
        }
    }

    /// Collapse to f64, mapping the infinite branch to +∞.
    pub fn as_bits(&self) -> f64 {
        match self {
            RelEntropy::Finite(v) => *v,
            RelEntropy::Infinite => f64::INFINITY,
        }
    }
}

fn clamp_negative_roundoff(value: f64) -> f64 {
    if (-NEGATIVE_CLAMP..0.0).contains(&value) {
        NEGATIVE_CLAMPS.fetch_add(1, Ordering::Relaxed);
        0.0
    } else {
        value
    }
}

#[inline]
fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// H(p) = −Σ p_i log₂ p_i.
pub fn shannon_entropy(p: &Spectrum) -> f64 {
    -p.probs().iter().map(|&x| xlog2x(x)).sum::<f64>()
}

/// H(p‖q) = Σ p_i (log₂ p_i − log₂ q_i); zero-probability terms of p
/// contribute nothing, and any p_i > 0 against q_i = 0 makes it +∞.
pub fn relative_entropy_classical(p: &Spectrum, q: &Spectrum) -> Result<RelEntropy, EntropyError> {
    if p.dim() != q.dim() {
        return Err(EntropyError::DimensionMismatch(p.dim(), q.dim()));
    }
    let mut acc = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(RelEntropy::Infinite);
        }
        acc += pi * (pi.log2() - qi.log2());
    }
    Ok(RelEntropy::Finite(clamp_negative_roundoff(acc)))
}

/// S(ρ) = H(λ(ρ)): Shannon entropy of the spectrum, basis-independent.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let eigs = rho.eigenvalues_desc();
    -eigs.iter().map(|&x| xlog2x(x)).sum::<f64>()
}

/// S(ρ‖σ) = Tr ρ(log₂ρ − log₂σ) when supp(ρ) ⊆ supp(σ), else +∞.
///
/// Support comparison treats eigenvalues ≤ `support_tol` as exact zeros:
/// any ρ-eigenvector with eigenvalue above the tolerance whose squared
/// overlap with σ's kernel exceeds the tolerance trips the infinite branch.
pub fn relative_entropy_quantum(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    support_tol: f64,
) -> Result<RelEntropy, EntropyError> {
    if rho.dim() != sigma.dim() {
        return Err(EntropyError::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let d = rho.dim();
    let er = rho.eigen();
    let es = sigma.eigen();

    // Squared overlaps |⟨w_j|u_i⟩|² between σ- and ρ-eigenvectors.
    let overlap: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            (0..d)
                .map(|i| {
                    let mut dot = num_complex::Complex64::new(0.0, 0.0);
                    for k in 0..d {
                        dot += es.eigenvectors.get(k, j).conj() * er.eigenvectors.get(k, i);
                    }
                    dot.norm_sqr()
                })
                .collect()
        })
        .collect();

    for (i, &lam) in er.eigenvalues.iter().enumerate() {
        if lam <= support_tol {
            continue;
        }
        let kernel_mass: f64 = overlap
            .iter()
            .zip(&es.eigenvalues)
            .filter(|(_, &mu)| mu <= support_tol)
            .map(|(row, _)| row[i])
            .sum();
        if kernel_mass > support_tol {
            return Ok(RelEntropy::Infinite);
        }
    }

    let tr_rho_log_rho: f64 = er
        .eigenvalues
        .iter()
        .map(|&l| if l > support_tol { l * l.log2() } else { 0.0 })
        .sum();

    let mut tr_rho_log_sigma = 0.0;
    for (row, &mu) in overlap.iter().zip(&es.eigenvalues) {
        if mu <= support_tol {
            continue;
        }
        // ⟨w_j|ρ|w_j⟩ expanded in ρ's eigenbasis.
        let weight: f64 = row
            .iter()
            .zip(&er.eigenvalues)
            .map(|(&ov, &l)| if l > 0.0 { l * ov } else { 0.0 })
            .sum();
        tr_rho_log_sigma += weight * mu.log2();
    }

    Ok(RelEntropy::Finite(clamp_negative_roundoff(
        tr_rho_log_rho - tr_rho_log_sigma,
    )))
}
