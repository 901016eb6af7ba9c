//! Seeded Monte Carlo campaigns over the Δ quantities, orbit verification,
//! super-additivity counterexample search, and local-unitary optimization.
//!
//! Determinism contract: every sample's randomness derives from
//! (master_seed, sample_index) alone, aggregation is a commutative-monoid
//! merge, and retained rows are a priority-keyed bottom-k subsample — so
//! summaries, CSV, and JSON are byte-identical for any worker count.

mod experiments;
pub mod report;
pub mod rng;
mod stats;
pub mod svg;

pub use experiments::{
    run, run_counterexample_search, run_local_opt, run_orbit_verify, run_spectra_deltas,
    run_state_deltas,
};
pub use report::{MatrixFixture, ParsedCsv, StateFixture};
pub use rng::{retention_priority, sample_rng};
pub use stats::{InputDigest, QuantityStats, RetainedRow, Retainer};

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deltas::{DeltaError, DeltaInputs};
use crate::entropy::EntropyError;
use crate::linalg::LinalgError;
use crate::marginal::MarginalError;
use crate::orbit::OrbitError;
use crate::unitary_opt::OptError;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("internal assertion failed: {0}")]
    InternalAssertion(String),
    #[error("malformed data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Marginal(#[from] MarginalError),
    #[error(transparent)]
    Delta(#[from] DeltaError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Opt(#[from] OptError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SpectraDeltas,
    StateDeltas,
    OrbitVerify,
    Counterexample,
    LocalOpt,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::SpectraDeltas => "spectra-deltas",
            Experiment::StateDeltas => "state-deltas",
            Experiment::OrbitVerify => "orbit-verify",
            Experiment::Counterexample => "counterexample",
            Experiment::LocalOpt => "local-opt",
        }
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Named numeric policy values, defaulted from the module contracts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Thresholds {
    /// Sign classification: < −cut negative, within ±cut zero.
    pub negative_cut: f64,
    /// Slack for the barΔ ≤ Δ_min / Δ_max ≤ Δ_mix ≤ Δ chain.
    pub ordering_slack: f64,
    /// Slack for the barΔ ≤ △S ≤ Δ sandwich (violations abort the run).
    pub sandwich_slack: f64,
    /// Slack for orbit-interval membership and alignment attainment.
    pub interval_slack: f64,
    /// Slack for the built-in admissibility cross-check on realized states.
    pub admissible_slack: f64,
    /// A counterexample search succeeds below this value.
    pub counterexample_cut: f64,
    /// Floor on the smallest reference joint-spectrum entry.
    pub full_rank_floor: f64,
    /// Floor on reference density-matrix eigenvalues.
    pub density_floor: f64,
    /// Margin rejection-sampler budget before the joint is resampled.
    pub margin_max_tries: u64,
    /// Haar samples per (ρ, σ) pair in orbit verification.
    pub haar_per_pair: u64,
    /// Haar restarts per pair in local optimization.
    pub multistart: u64,
    /// Bottom-k cap on retained CSV/plot rows.
    pub row_cap: u64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            negative_cut: 1e-12,
            ordering_slack: 1e-10,
            sandwich_slack: 1e-9,
            interval_slack: 1e-9,
            admissible_slack: 1e-10,
            counterexample_cut: -1e-6,
            full_rank_floor: 1e-6,
            density_floor: 1e-12,
            margin_max_tries: 1_000_000,
            haar_per_pair: 1000,
            multistart: 20,
            row_cap: 10_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub experiment: Experiment,
    pub n_samples: u64,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub workers: usize,
    pub thresholds: Thresholds,
}

impl CampaignConfig {
    pub fn new(experiment: Experiment, n_samples: u64, master_seed: u64) -> Self {
        Self {
            experiment,
            n_samples,
            master_seed,
            output_dir: PathBuf::from("out"),
            workers: 1,
            thresholds: Thresholds::default(),
        }
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.n_samples < 1 {
            return Err(CampaignError::InvalidConfig("n_samples must be ≥ 1".into()));
        }
        if self.workers < 1 {
            return Err(CampaignError::InvalidConfig("workers must be ≥ 1".into()));
        }
        let t = &self.thresholds;
        if t.margin_max_tries < 1 || t.haar_per_pair < 1 || t.multistart < 1 {
            return Err(CampaignError::InvalidConfig(
                "margin_max_tries, haar_per_pair and multistart must be ≥ 1".into(),
            ));
        }
        let positive = |x: f64| x > 0.0;
        if !positive(t.negative_cut) || !positive(t.full_rank_floor) || !positive(t.density_floor) {
            return Err(CampaignError::InvalidConfig(
                "tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A sample whose value crossed a conjecture boundary; emitted as data, not
/// as a failure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialCounterexample {
    pub sample_index: u64,
    pub quantity: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs: Option<DeltaInputs>,
}

/// Aggregated result of one campaign. Everything serialized here is a pure
/// function of (experiment, n_samples, master_seed); runtime and row data
/// are carried in memory but stay out of the JSON.
#[derive(Debug, Clone, Serialize)]
pub struct CampaignSummary {
    pub experiment: Experiment,
    pub seed: u64,
    pub n_samples: u64,
    pub quantities: BTreeMap<String, QuantityStats>,
    pub support_violations: u64,
    pub resample_events: u64,
    #[serde(skip)]
    pub potential_counterexamples: Vec<PotentialCounterexample>,
    #[serde(skip)]
    pub retained: Vec<RetainedRow>,
    #[serde(skip)]
    pub fixture: Option<StateFixture>,
    #[serde(skip)]
    pub runtime_seconds: f64,
}

impl CampaignSummary {
    pub fn quantity(&self, name: &str) -> &QuantityStats {
        self.quantities
            .get(name)
            .unwrap_or_else(|| panic!("missing quantity {name}"))
    }
}
