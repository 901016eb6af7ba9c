//! Two-qubit marginal admissibility: which (joint spectrum, margin
//! eigenvalue) triples are realized by an actual two-qubit state.
//!
//! For a joint spectrum λ₁ ≥ λ₂ ≥ λ₃ ≥ λ₄ and minimal margin eigenvalues
//! λ_A, λ_B, the triple is admissible iff
//!
//!   (i)   min(λ_A, λ_B) ≥ λ₃ + λ₄
//!   (ii)  λ_A + λ_B     ≥ λ₂ + λ₃ + 2λ₄
//!   (iii) |λ_A − λ_B|   ≤ min(λ₁ − λ₃, λ₂ − λ₄)

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entropy::Spectrum;
use crate::linalg::{partial_trace, DensityMatrix, Subsystem};

/// Resampling floor for reference-state joint spectra: strictly positive,
/// with enough headroom that log₂ of the smallest entry stays tame.
pub const FULL_RANK_FLOOR: f64 = 1e-6;

/// Slack used by the built-in cross-check in [`margins_of_state`].
pub const NECESSITY_SLACK: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum MarginalError {
    #[error("joint spectrum must have dimension 4, got {0}")]
    JointDimension(usize),
    #[error("margin eigenvalue {0} outside [0, 1/2]")]
    MarginRange(f64),
    #[error("no admissible margins found after {tries} tries for joint {joint:?}")]
    SamplingExhausted { joint: Vec<f64>, tries: u64 },
}

/// A 4-outcome joint spectrum plus the two margins' minimal eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitMarginTriple {
    joint: Spectrum,
    margin_a: f64,
    margin_b: f64,
}

impl QubitMarginTriple {
    pub fn new(joint: Spectrum, margin_a: f64, margin_b: f64) -> Result<Self, MarginalError> {
        if joint.dim() != 4 {
            return Err(MarginalError::JointDimension(joint.dim()));
        }
        for m in [margin_a, margin_b] {
            if !(-1e-12..=0.5 + 1e-12).contains(&m) {
                return Err(MarginalError::MarginRange(m));
            }
        }
        Ok(Self {
            joint,
            margin_a: margin_a.clamp(0.0, 0.5),
            margin_b: margin_b.clamp(0.0, 0.5),
        })
    }

    pub fn joint(&self) -> &Spectrum {
        &self.joint
    }

    pub fn margin_a(&self) -> f64 {
        self.margin_a
    }

    pub fn margin_b(&self) -> f64 {
        self.margin_b
    }
}

/// Outcome of the admissibility predicate. Residuals are LHS − RHS of each
/// inequality in its stated orientation: (i) and (ii) are satisfied when
/// their residual ≥ −slack, (iii) when its residual ≤ slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BravyiCheck {
    pub admissible: bool,
    pub residuals: [f64; 3],
}

fn bravyi_residuals(joint_desc: &[f64], margin_a: f64, margin_b: f64) -> [f64; 3] {
    let (l1, l2, l3, l4) = (joint_desc[0], joint_desc[1], joint_desc[2], joint_desc[3]);
    [
        margin_a.min(margin_b) - (l3 + l4),
        margin_a + margin_b - (l2 + l3 + 2.0 * l4),
        (margin_a - margin_b).abs() - (l1 - l3).min(l2 - l4),
    ]
}

/// Test the three margin inequalities at the given slack.
pub fn bravyi_admissible(t: &QubitMarginTriple, slack: f64) -> BravyiCheck {
    let sorted = t.joint.sorted_desc();
    let residuals = bravyi_residuals(sorted.probs(), t.margin_a, t.margin_b);
    let admissible = residuals[0] >= -slack && residuals[1] >= -slack && residuals[2] <= slack;
    BravyiCheck {
        admissible,
        residuals,
    }
}

/// Uniform draw from the 3-simplex (normalized standard exponentials),
/// returned sorted non-increasing. With `require_full_rank`, resample until
/// the smallest entry clears [`FULL_RANK_FLOOR`].
pub fn sample_joint_spectrum<R: Rng + ?Sized>(rng: &mut R, require_full_rank: bool) -> Spectrum {
    loop {
        let mut draws = [0.0_f64; 4];
        for d in &mut draws {
            *d = rng.sample(Exp1);
        }
        let sum: f64 = draws.iter().sum();
        let mut probs: Vec<f64> = draws.iter().map(|d| d / sum).collect();
        probs.sort_by(|a, b| b.partial_cmp(a).expect("NaN draw"));
        if require_full_rank && probs[3] <= FULL_RANK_FLOOR {
            continue;
        }
        return Spectrum::new(probs).expect("normalized draw is a valid spectrum");
    }
}

/// Rejection-sample margins uniformly on [0, 1/2]² until the triple passes
/// the admissibility predicate at slack zero. The admissible region has
/// positive area for every joint drawn from the interior of the simplex;
/// exhaustion signals RNG starvation near a degenerate joint, not an empty
/// region, and callers resample the joint.
pub fn sample_admissible_margins<R: Rng + ?Sized>(
    joint: &Spectrum,
    rng: &mut R,
    max_tries: u64,
) -> Result<(f64, f64), MarginalError> {
    if joint.dim() != 4 {
        return Err(MarginalError::JointDimension(joint.dim()));
    }
    let sorted = joint.sorted_desc();
    for _ in 0..max_tries {
        let a = 0.5 * rng.gen::<f64>();
        let b = 0.5 * rng.gen::<f64>();
        let r = bravyi_residuals(sorted.probs(), a, b);
        if r[0] >= 0.0 && r[1] >= 0.0 && r[2] <= 0.0 {
            return Ok((a, b));
        }
    }
    Err(MarginalError::SamplingExhausted {
        joint: sorted.probs().to_vec(),
        tries: max_tries,
    })
}

/// Spectrum triple of an actual two-qubit state: joint eigenvalues plus the
/// minimal eigenvalues of both partial traces. The result is cross-checked
/// against the admissibility predicate, which physically realized states
/// satisfy; a failure would mean a linear-algebra bug, hence the panic.
pub fn margins_of_state(rho_ab: &DensityMatrix) -> QubitMarginTriple {
    assert_eq!(rho_ab.dim(), 4, "two-qubit state required");
    let joint = Spectrum::new(rho_ab.eigenvalues_desc()).expect("state spectrum is normalized");

    let min_margin_eig = |keep: Subsystem| -> f64 {
        let reduced = partial_trace(rho_ab.matrix(), 2, 2, keep).expect("4 = 2x2");
        let eig = crate::linalg::eig_hermitian(&reduced, 1e-9).expect("reduced state Hermitian");
        eig.min_eigenvalue().clamp(0.0, 0.5)
    };
    let margin_a = min_margin_eig(Subsystem::A);
    let margin_b = min_margin_eig(Subsystem::B);

    let triple = QubitMarginTriple::new(joint, margin_a, margin_b)
        .expect("margins of a state lie in [0, 1/2]");
    let check = bravyi_admissible(&triple, NECESSITY_SLACK);
    assert!(
        check.admissible,
        "realized state violates margin constraints: {:?}",
        check.residuals
    );
    triple
}

/// Joint spectrum plus admissible margins in one step.
pub fn sample_admissible_triple<R: Rng + ?Sized>(
    rng: &mut R,
    require_full_rank: bool,
    max_tries: u64,
) -> Result<QubitMarginTriple, MarginalError> {
    let joint = sample_joint_spectrum(rng, require_full_rank);
    let (a, b) = sample_admissible_margins(&joint, rng, max_tries)?;
    QubitMarginTriple::new(joint, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn triple(joint: &[f64], a: f64, b: f64) -> QubitMarginTriple {
        QubitMarginTriple::new(Spectrum::new(joint.to_vec()).unwrap(), a, b).unwrap()
    }

    #[test]
    fn maximally_mixed_margins_admissible() {
        let t = triple(&[0.25, 0.25, 0.25, 0.25], 0.5, 0.5);
        assert!(bravyi_admissible(&t, 0.0).admissible);
    }

    #[test]
    fn first_inequality_residual_reported() {
        let t = triple(&[0.25, 0.25, 0.25, 0.25], 0.4, 0.5);
        let check = bravyi_admissible(&t, 1e-12);
        assert!(!check.admissible);
        assert!((check.residuals[0] + 0.1).abs() <= 1e-12);
    }

    #[test]
    fn pure_joint_requires_equal_margins() {
        let equal = triple(&[1.0, 0.0, 0.0, 0.0], 0.3, 0.3);
        assert!(bravyi_admissible(&equal, 0.0).admissible);
        let unequal = triple(&[1.0, 0.0, 0.0, 0.0], 0.3, 0.2);
        let check = bravyi_admissible(&unequal, 1e-12);
        assert!(!check.admissible);
        assert!((check.residuals[2] - 0.1).abs() <= 1e-12);
    }

    #[test]
    fn joint_sampler_is_sorted_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..1000 {
            let s = sample_joint_spectrum(&mut rng, true);
            let p = s.probs();
            assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            assert!(p.windows(2).all(|w| w[0] >= w[1]));
            assert!(p[3] > FULL_RANK_FLOOR);
        }
    }

    #[test]
    fn joint_sampler_max_component_moment() {
        // Order statistics of the uniform simplex: E[max] = (1/4)·H₄ = 25/48.
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let n = 100_000;
        let mean_max: f64 = (0..n)
            .map(|_| sample_joint_spectrum(&mut rng, false).probs()[0])
            .sum::<f64>()
            / n as f64;
        let expected = 0.25 * (1.0 + 0.5 + 1.0 / 3.0 + 0.25);
        assert!(
            (mean_max - expected).abs() <= 0.005,
            "mean max {mean_max} vs {expected}"
        );
    }

    #[test]
    fn margin_sampler_is_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..500 {
            let joint = sample_joint_spectrum(&mut rng, false);
            let (a, b) = sample_admissible_margins(&joint, &mut rng, 1_000_000).unwrap();
            let t = QubitMarginTriple::new(joint, a, b).unwrap();
            assert!(bravyi_admissible(&t, 0.0).admissible);
        }
    }

    #[test]
    fn margin_sampler_on_pure_joint_forces_near_equal_margins() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let joint = Spectrum::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        // Inequality (iii) has zero width here, so acceptance needs two
        // draws to coincide; starvation is the expected outcome.
        let result = sample_admissible_margins(&joint, &mut rng, 10_000);
        match result {
            Ok((a, b)) => assert!((a - b).abs() <= 1e-12),
            Err(MarginalError::SamplingExhausted { .. }) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn margin_sampler_starves_on_maximally_mixed_joint() {
        // The admissible region degenerates to the single point (1/2, 1/2),
        // which uniform draws never hit at slack zero; callers resample the
        // joint instead. Interior joints from the simplex sampler are never
        // affected.
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        let joint = Spectrum::uniform(4);
        assert!(matches!(
            sample_admissible_margins(&joint, &mut rng, 10_000),
            Err(MarginalError::SamplingExhausted { .. })
        ));
        let t = QubitMarginTriple::new(Spectrum::uniform(4), 0.5, 0.5).unwrap();
        assert!(bravyi_admissible(&t, 0.0).admissible);
    }

    #[test]
    fn margins_of_simple_states() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(&[
            Complex64::new(inv, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(inv, 0.0),
        ])
        .unwrap();
        let t = margins_of_state(&bell);
        assert!((t.joint().sorted_desc().probs()[0] - 1.0).abs() <= 1e-10);
        assert!((t.margin_a() - 0.5).abs() <= 1e-10);
        assert!((t.margin_b() - 0.5).abs() <= 1e-10);

        let mixed = DensityMatrix::maximally_mixed(4);
        let t = margins_of_state(&mixed);
        assert!((t.margin_a() - 0.5).abs() <= 1e-12);
        assert!((t.margin_b() - 0.5).abs() <= 1e-12);

        let diag = DensityMatrix::from_diag(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        let t = margins_of_state(&diag);
        assert!((t.margin_a() - 0.3).abs() <= 1e-12);
        assert!((t.margin_b() - 0.4).abs() <= 1e-12);
    }

    #[test]
    fn necessity_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..2000 {
            let rho = DensityMatrix::ginibre(4, &mut rng);
            // margins_of_state cross-checks admissibility internally.
            let _ = margins_of_state(&rho);
        }
    }
}
