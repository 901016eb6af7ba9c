//! The Δ differences between joint and margin relative entropies.
//!
//! With λ↓/λ↑ the sorted joint spectra and margins parametrized as
//! [1−x, x] for x ∈ [0, ½], five scalars are computed per (ρ, σ) triple
//! pair, differing only in which ordering each H term pairs:
//!
//!   Δ_min = H(λ↓AB‖μ↓AB) − H(λ↓A‖μ↓A) − H(λ↓B‖μ↓B)
//!   Δ_max = H(λ↓AB‖μ↑AB) − H(λ↓A‖μ↑A) − H(λ↓B‖μ↑B)
//!   Δ_mix = H(λ↓AB‖μ↑AB) − H(λ↓A‖μ↑A) − H(λ↓B‖μ↓B)
//!   Δ     = H(λ↓AB‖μ↑AB) − H(λ↓A‖μ↓A) − H(λ↓B‖μ↓B)
//!   barΔ  = H(λ↓AB‖μ↓AB) − H(λ↓A‖μ↑A) − H(λ↓B‖μ↑B)
//!
//! Since same-order pairing minimizes each margin term and opposite-order
//! pairing maximizes it, the chain barΔ ≤ Δ_min, barΔ ≤ Δ_max ≤ Δ_mix ≤ Δ
//! holds identically; it is enforced as a postcondition. The quantum
//! difference △S = S(ρ_AB‖σ_AB) − S(ρ_A‖σ_A) − S(ρ_B‖σ_B) always lies in
//! [barΔ, Δ].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entropy::{
    relative_entropy_classical, relative_entropy_quantum, RelEntropy, Spectrum, DEFAULT_SUPPORT_TOL,
};
use crate::linalg::{partial_trace, DensityMatrix, Subsystem};
use crate::marginal::QubitMarginTriple;

/// Slack for the ordering-chain postcondition.
pub const ORDERING_SLACK: f64 = 1e-10;

/// Slack for the barΔ ≤ △S ≤ Δ sandwich.
pub const SANDWICH_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DeltaError {
    #[error("reference joint spectrum has a zero entry (μ₄ must be > 0)")]
    SigmaJointDegenerate,
    #[error("reference margin eigenvalue {0} outside (0, 1/2]")]
    SigmaMarginDegenerate(f64),
    #[error("expected a two-qubit state (dim 4), got dim {0}")]
    NotTwoQubit(usize),
    #[error("ordering chain violated by {excess:.3e}: {report:?}")]
    OrderingViolation {
        excess: f64,
        report: Box<DeltaReport>,
    },
}

/// The spectrum triples a report was computed from; carried along so any
/// sample can be reproduced exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaInputs {
    pub rho: QubitMarginTriple,
    pub sigma: QubitMarginTriple,
}

/// The five spectral differences (plus △S in density-matrix mode), in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_mix: f64,
    pub delta: f64,
    pub delta_bar: f64,
    pub delta_s: Option<f64>,
    pub inputs: DeltaInputs,
}

impl DeltaReport {
    /// Values keyed by quantity name, in a fixed order.
    pub fn named_values(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![
            ("delta_min", self.delta_min),
            ("delta_max", self.delta_max),
            ("delta_mix", self.delta_mix),
            ("delta", self.delta),
            ("delta_bar", self.delta_bar),
        ];
        if let Some(ds) = self.delta_s {
            v.push(("delta_s", ds));
        }
        v
    }
}

/// Margin spectrum [1−x, x], already in descending order for x ≤ ½.
fn margin_desc(x: f64) -> Spectrum {
    Spectrum::new(vec![1.0 - x, x]).expect("margin parametrization is normalized")
}

/// Margin spectrum [x, 1−x]: ascending order of the same distribution.
fn margin_asc(x: f64) -> Spectrum {
    Spectrum::new(vec![x, 1.0 - x]).expect("margin parametrization is normalized")
}

fn finite(
    value: Result<RelEntropy, crate::entropy::EntropyError>,
    on_infinite: DeltaError,
) -> Result<f64, DeltaError> {
    match value.expect("dimensions fixed at 4 and 2") {
        RelEntropy::Finite(v) => Ok(v),
        RelEntropy::Infinite => Err(on_infinite),
    }
}

/// Compute all five spectral differences for one (ρ-triple, σ-triple) pair.
pub fn compute_deltas(
    rho_triple: &QubitMarginTriple,
    sigma_triple: &QubitMarginTriple,
) -> Result<DeltaReport, DeltaError> {
    let mu = sigma_triple.joint().sorted_desc();
    if mu.min() <= 0.0 {
        return Err(DeltaError::SigmaJointDegenerate);
    }
    for m in [sigma_triple.margin_a(), sigma_triple.margin_b()] {
        if m <= 0.0 {
            return Err(DeltaError::SigmaMarginDegenerate(m));
        }
    }

    let lam_ab = rho_triple.joint().sorted_desc();
    let mu_ab_desc = mu.clone();
    let mu_ab_asc = sigma_triple.joint().sorted_asc();

    let lam_a = margin_desc(rho_triple.margin_a());
    let lam_b = margin_desc(rho_triple.margin_b());
    let mu_a_desc = margin_desc(sigma_triple.margin_a());
    let mu_a_asc = margin_asc(sigma_triple.margin_a());
    let mu_b_desc = margin_desc(sigma_triple.margin_b());
    let mu_b_asc = margin_asc(sigma_triple.margin_b());

    let h = |p: &Spectrum, q: &Spectrum| -> Result<f64, DeltaError> {
        finite(
            relative_entropy_classical(p, q),
            DeltaError::SigmaJointDegenerate,
        )
    };

    let h_dd_ab = h(&lam_ab, &mu_ab_desc)?;
    let h_du_ab = h(&lam_ab, &mu_ab_asc)?;
    let h_dd_a = h(&lam_a, &mu_a_desc)?;
    let h_du_a = h(&lam_a, &mu_a_asc)?;
    let h_dd_b = h(&lam_b, &mu_b_desc)?;
    let h_du_b = h(&lam_b, &mu_b_asc)?;

    let report = DeltaReport {
        delta_min: h_dd_ab - h_dd_a - h_dd_b,
        delta_max: h_du_ab - h_du_a - h_du_b,
        delta_mix: h_du_ab - h_du_a - h_dd_b,
        delta: h_du_ab - h_dd_a - h_dd_b,
        delta_bar: h_dd_ab - h_du_a - h_du_b,
        delta_s: None,
        inputs: DeltaInputs {
            rho: rho_triple.clone(),
            sigma: sigma_triple.clone(),
        },
    };

    // The chain is exact mathematics; allow extra slack only in proportion
    // to the magnitude of the terms (deep-log references inflate round-off).
    let scale = [h_dd_ab, h_du_ab, h_dd_a, h_du_a, h_dd_b, h_du_b]
        .iter()
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    let slack = ORDERING_SLACK.max(1e-14 * scale);
    let excess = [
        report.delta_bar - report.delta_min,
        report.delta_bar - report.delta_max,
        report.delta_max - report.delta_mix,
        report.delta_mix - report.delta,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    if excess > slack {
        return Err(DeltaError::OrderingViolation {
            excess,
            report: Box::new(report),
        });
    }

    Ok(report)
}

/// △S = S(ρ_AB‖σ_AB) − S(ρ_A‖σ_A) − S(ρ_B‖σ_B). A support violation in any
/// of the three terms propagates as the infinite branch.
pub fn delta_s(rho_ab: &DensityMatrix, sigma_ab: &DensityMatrix) -> Result<RelEntropy, DeltaError> {
    if rho_ab.dim() != 4 {
        return Err(DeltaError::NotTwoQubit(rho_ab.dim()));
    }
    if sigma_ab.dim() != 4 {
        return Err(DeltaError::NotTwoQubit(sigma_ab.dim()));
    }

    let reduce = |m: &DensityMatrix, keep: Subsystem| -> DensityMatrix {
        let red = partial_trace(m.matrix(), 2, 2, keep).expect("4 = 2x2");
        DensityMatrix::new(red).expect("partial trace of a state is a state")
    };

    let joint =
        relative_entropy_quantum(rho_ab, sigma_ab, DEFAULT_SUPPORT_TOL).expect("dims match");
    let term_a = relative_entropy_quantum(
        &reduce(rho_ab, Subsystem::A),
        &reduce(sigma_ab, Subsystem::A),
        DEFAULT_SUPPORT_TOL,
    )
    .expect("dims match");
    let term_b = relative_entropy_quantum(
        &reduce(rho_ab, Subsystem::B),
        &reduce(sigma_ab, Subsystem::B),
        DEFAULT_SUPPORT_TOL,
    )
    .expect("dims match");

    match (joint, term_a, term_b) {
        (RelEntropy::Finite(j), RelEntropy::Finite(a), RelEntropy::Finite(b)) => {
            Ok(RelEntropy::Finite(j - a - b))
        }
        _ => Ok(RelEntropy::Infinite),
    }
}
