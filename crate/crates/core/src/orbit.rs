//! Extremes of S(UρU†‖σ) over the unitary orbit of ρ.
//!
//! For invertible σ the orbit image is exactly the interval
//! [H(λ↓(ρ)‖λ↓(σ)), H(λ↓(ρ)‖λ↑(σ))]: aligning both spectra in the same
//! order minimizes, opposite order maximizes, and path-connectedness fills
//! everything in between. Both endpoints are attained by explicit basis
//! alignments, built here as W·P·V†.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entropy::{
    relative_entropy_classical, relative_entropy_quantum, Spectrum, DEFAULT_SUPPORT_TOL,
};
use crate::linalg::{sample_haar_unitary, ComplexMatrix, DensityMatrix};

/// Slack for interval-membership checks.
pub const INTERVAL_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("spectra have different dimensions: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("reference spectrum has a zero entry; it must be invertible")]
    SingularReference,
}

/// Endpoints of the orbit interval, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitExtremes {
    pub min_value: f64,
    pub max_value: f64,
}

/// Analytic min and max of S(UρU†‖σ) from the two spectra alone.
pub fn orbit_extremes(
    rho_spec: &Spectrum,
    sigma_spec: &Spectrum,
) -> Result<OrbitExtremes, OrbitError> {
    if rho_spec.dim() != sigma_spec.dim() {
        return Err(OrbitError::DimensionMismatch(
            rho_spec.dim(),
            sigma_spec.dim(),
        ));
    }
    if sigma_spec.min() <= 0.0 {
        return Err(OrbitError::SingularReference);
    }
    let rho_desc = rho_spec.sorted_desc();
    let min_value = relative_entropy_classical(&rho_desc, &sigma_spec.sorted_desc())
        .expect("dimensions checked")
        .finite()
        .expect("positive reference spectrum");
    let max_value = relative_entropy_classical(&rho_desc, &sigma_spec.sorted_asc())
        .expect("dimensions checked")
        .finite()
        .expect("positive reference spectrum");
    debug_assert!(min_value <= max_value + 1e-12);
    Ok(OrbitExtremes {
        min_value,
        max_value,
    })
}

/// Which orbit endpoint an alignment should reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alignment {
    Minimizing,
    Maximizing,
}

/// Unitary mapping ρ's eigenbasis onto σ's so the rotated state commutes
/// with σ: descending-to-descending pairing for the minimum, descending-to-
/// ascending for the maximum.
pub fn aligned_unitary(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alignment: Alignment,
) -> ComplexMatrix {
    let d = rho.dim();
    let v = rho.eigen().eigenvectors;
    let w = sigma.eigen().eigenvectors;
    let w = match alignment {
        Alignment::Minimizing => w,
        // Reverse σ's descending basis so ρ's largest meets σ's smallest.
        Alignment::Maximizing => ComplexMatrix::from_fn(d, d, |r, c| w.get(r, d - 1 - c)),
    };
    w.matmul(&v.adjoint())
}

/// Empirical check of the interval statement for one (ρ, σ) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitIntervalReport {
    pub extremes: OrbitExtremes,
    pub observed_min: f64,
    pub observed_max: f64,
    /// Values at the two explicit alignments.
    pub attained_min: f64,
    pub attained_max: f64,
    /// Worst |attained − analytic| across both endpoints.
    pub alignment_error: f64,
    /// Haar samples falling outside [min − slack, max + slack].
    pub out_of_interval: u64,
    pub n_samples: u64,
    /// Observed range over analytic range (1 when the interval is a point).
    pub coverage: f64,
}

/// Sample Haar unitaries, evaluate S(UρU†‖σ) for each, and compare the
/// observations (plus the two explicit alignments) against the analytic
/// interval.
pub fn verify_orbit_interval<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n_samples: usize,
    rng: &mut R,
) -> Result<OrbitIntervalReport, OrbitError> {
    if rho.dim() != sigma.dim() {
        return Err(OrbitError::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let rho_spec = Spectrum::new(rho.eigenvalues_desc()).expect("state spectrum");
    let sigma_spec = Spectrum::new(sigma.eigenvalues_desc()).expect("state spectrum");
    let extremes = orbit_extremes(&rho_spec, &sigma_spec)?;

    let eval = |u: &ComplexMatrix| -> f64 {
        relative_entropy_quantum(&rho.conjugated_by(u), sigma, DEFAULT_SUPPORT_TOL)
            .expect("dimensions match")
            .as_bits()
    };

    let attained_min = eval(&aligned_unitary(rho, sigma, Alignment::Minimizing));
    let attained_max = eval(&aligned_unitary(rho, sigma, Alignment::Maximizing));
    let alignment_error = (attained_min - extremes.min_value)
        .abs()
        .max((attained_max - extremes.max_value).abs());

    let mut observed_min = attained_min.min(attained_max);
    let mut observed_max = attained_min.max(attained_max);
    let mut out_of_interval = 0u64;
    for _ in 0..n_samples {
        let u = sample_haar_unitary(rho.dim(), rng);
        let value = eval(&u);
        observed_min = observed_min.min(value);
        observed_max = observed_max.max(value);
        if value < extremes.min_value - INTERVAL_SLACK
            || value > extremes.max_value + INTERVAL_SLACK
        {
            out_of_interval += 1;
        }
    }
    if attained_min < extremes.min_value - INTERVAL_SLACK
        || attained_max > extremes.max_value + INTERVAL_SLACK
    {
        out_of_interval += 1;
    }

    let range = extremes.max_value - extremes.min_value;
    let coverage = if range <= 1e-15 {
        1.0
    } else {
        (observed_max - observed_min) / range
    };

    Ok(OrbitIntervalReport {
        extremes,
        observed_min,
        observed_max,
        attained_min,
        attained_max,
        alignment_error,
        out_of_interval,
        n_samples: n_samples as u64,
        coverage,
    })
}
