//! The five experiment drivers. Each fans sample indices out over worker
//! threads, aggregates into a [`Agg`] per worker, and merges.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;

use super::report::StateFixture;
use super::rng::{retention_priority, sample_rng};
use super::stats::{QuantityStats, RetainedRow, Retainer};
use super::{
    CampaignConfig, CampaignError, CampaignSummary, Experiment, PotentialCounterexample, Thresholds,
};
use crate::deltas::{compute_deltas, delta_s, DeltaInputs};
use crate::entropy::{relative_entropy_quantum, Spectrum, DEFAULT_SUPPORT_TOL};
use crate::linalg::{partial_trace, DensityMatrix, Subsystem};
use crate::marginal::{
    margins_of_state, sample_admissible_triple, MarginalError, QubitMarginTriple,
};
use crate::orbit::{orbit_extremes, verify_orbit_interval};
use crate::unitary_opt::{optimize_local, Manifold, Mode, OptimizerConfig};

/// Per-worker aggregate; merging is commutative and associative.
struct Agg {
    stats: BTreeMap<String, QuantityStats>,
    retainer: Retainer,
    potentials: Vec<PotentialCounterexample>,
    resamples: u64,
    support_violations: u64,
    best: Option<BestPair>,
}

struct BestPair {
    index: u64,
    value: f64,
    rho: DensityMatrix,
    sigma: DensityMatrix,
}

impl Agg {
    fn new(row_cap: u64) -> Self {
        Self {
            stats: BTreeMap::new(),
            retainer: Retainer::new(row_cap as usize),
            potentials: Vec::new(),
            resamples: 0,
            support_violations: 0,
            best: None,
        }
    }

    fn observe(
        &mut self,
        name: &str,
        index: u64,
        value: f64,
        inputs: Option<&DeltaInputs>,
        cut: f64,
    ) {
        self.stats
            .entry(name.to_string())
            .or_default()
            .observe(index, value, inputs, cut);
    }

    fn offer_best(&mut self, index: u64, value: f64, rho: &DensityMatrix, sigma: &DensityMatrix) {
        let better = match &self.best {
            None => true,
            Some(b) => value < b.value || (value == b.value && index < b.index),
        };
        if better {
            self.best = Some(BestPair {
                index,
                value,
                rho: rho.clone(),
                sigma: sigma.clone(),
            });
        }
    }

    fn merge(mut self, other: Agg) -> Agg {
        for (k, v) in other.stats {
            match self.stats.entry(k) {
                std::collections::btree_map::Entry::Occupied(mut e) => e.get_mut().merge(v),
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(v);
                }
            }
        }
        self.retainer.merge(other.retainer);
        self.potentials.extend(other.potentials);
        self.resamples += other.resamples;
        self.support_violations += other.support_violations;
        if let Some(b) = other.best {
            let take = match &self.best {
                None => true,
                Some(mine) => {
                    b.value < mine.value || (b.value == mine.value && b.index < mine.index)
                }
            };
            if take {
                self.best = Some(b);
            }
        }
        self
    }

    fn into_summary(self, config: &CampaignConfig) -> CampaignSummary {
        let mut potentials = self.potentials;
        potentials.sort_by(|a, b| {
            (a.sample_index, a.quantity.as_str()).cmp(&(b.sample_index, b.quantity.as_str()))
        });
        let fixture = self
            .best
            .map(|b| StateFixture::new(b.index, b.value, &b.rho, &b.sigma));
        CampaignSummary {
            experiment: config.experiment,
            seed: config.master_seed,
            n_samples: config.n_samples,
            quantities: self.stats,
            support_violations: self.support_violations,
            resample_events: self.resamples,
            potential_counterexamples: potentials,
            retained: self.retainer.finish(),
            fixture,
            runtime_seconds: 0.0,
        }
    }
}

/// Fan indices 0..n out over contiguous chunks, one worker thread each.
fn parallel_fold<Step>(
    n: u64,
    workers: usize,
    row_cap: u64,
    step: Step,
) -> Result<Agg, CampaignError>
where
    Step: Fn(&mut Agg, u64) -> Result<(), CampaignError> + Sync,
{
    let workers = workers.min(n.max(1) as usize).max(1);
    let chunk = n.div_ceil(workers as u64).max(1);
    let ranges: Vec<(u64, u64)> = (0..workers as u64)
        .map(|w| (w * chunk, ((w + 1) * chunk).min(n)))
        .filter(|(s, e)| s < e)
        .collect();

    if ranges.len() <= 1 {
        let mut agg = Agg::new(row_cap);
        for i in 0..n {
            step(&mut agg, i)?;
        }
        return Ok(agg);
    }

    let partials: Vec<Result<Agg, CampaignError>> = std::thread::scope(|scope| {
        let step = &step;
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(start, end)| {
                scope.spawn(move || {
                    let mut agg = Agg::new(row_cap);
                    for i in start..end {
                        step(&mut agg, i)?;
                    }
                    Ok(agg)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join().unwrap_or_else(|_| {
                    Err(CampaignError::InternalAssertion(
                        "worker thread panicked".into(),
                    ))
                })
            })
            .collect()
    });

    let mut merged: Option<Agg> = None;
    for partial in partials {
        let agg = partial?;
        merged = Some(match merged {
            None => agg,
            Some(m) => m.merge(agg),
        });
    }
    Ok(merged.expect("at least one worker range"))
}

/// Dispatch on the configured experiment.
pub fn run(config: &CampaignConfig) -> Result<CampaignSummary, CampaignError> {
    match config.experiment {
        Experiment::SpectraDeltas => run_spectra_deltas(config),
        Experiment::StateDeltas => run_state_deltas(config),
        Experiment::OrbitVerify => run_orbit_verify(config),
        Experiment::Counterexample => run_counterexample_search(config),
        Experiment::LocalOpt => run_local_opt(config),
    }
}

fn sample_triple_with_retries<R: Rng + ?Sized>(
    rng: &mut R,
    full_rank: bool,
    th: &Thresholds,
    resamples: &mut u64,
) -> Result<QubitMarginTriple, CampaignError> {
    loop {
        match sample_admissible_triple(rng, full_rank, th.margin_max_tries) {
            Ok(t) => return Ok(t),
            Err(MarginalError::SamplingExhausted { .. }) => *resamples += 1,
            Err(e) => return Err(e.into()),
        }
    }
}

/// Spectra-level Δ campaign: admissible ρ-triples against full-rank
/// admissible σ-triples, five quantities per sample. Negative Δ or Δ_mix
/// samples are flagged as potential counterexamples with full inputs.
pub fn run_spectra_deltas(config: &CampaignConfig) -> Result<CampaignSummary, CampaignError> {
    config.validate()?;
    let start = Instant::now();
    let th = &config.thresholds;
    let seed = config.master_seed;

    let agg = parallel_fold(config.n_samples, config.workers, th.row_cap, |agg, i| {
        let mut rng = sample_rng(seed, i);
        let rho = sample_triple_with_retries(&mut rng, false, th, &mut agg.resamples)?;
        let sigma = sample_triple_with_retries(&mut rng, true, th, &mut agg.resamples)?;
        let report = compute_deltas(&rho, &sigma)?;
        for (name, value) in report.named_values() {
            agg.observe(name, i, value, Some(&report.inputs), th.negative_cut);
        }
        for (name, value) in [("delta", report.delta), ("delta_mix", report.delta_mix)] {
            if value < -th.negative_cut {
                agg.potentials.push(PotentialCounterexample {
                    sample_index: i,
                    quantity: name.into(),
                    value,
                    inputs: Some(report.inputs.clone()),
                });
            }
        }
        agg.retainer.offer(
            retention_priority(seed, i),
            RetainedRow { index: i, report },
        );
        Ok(())
    })?;

    let mut summary = agg.into_summary(config);
    summary.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(summary)
}

/// Density-matrix Δ campaign: Ginibre pairs, spectral report plus △S, with
/// the barΔ ≤ △S ≤ Δ sandwich enforced per sample. Sample 0 is the ρ = σ
/// fixture and must come out exactly neutral.
pub fn run_state_deltas(config: &CampaignConfig) -> Result<CampaignSummary, CampaignError> {
    config.validate()?;
    let start = Instant::now();
    let th = &config.thresholds;
    let seed = config.master_seed;

    let agg = parallel_fold(config.n_samples, config.workers, th.row_cap, |agg, i| {
        let mut rng = sample_rng(seed, i);
        let (rho, sigma) = if i == 0 {
            let rho = DensityMatrix::ginibre_full_rank(4, &mut rng, th.density_floor);
            let sigma = rho.clone();
            (rho, sigma)
        } else {
            let rho = DensityMatrix::ginibre(4, &mut rng);
            let sigma = DensityMatrix::ginibre_full_rank(4, &mut rng, th.density_floor);
            (rho, sigma)
        };

        let ds = delta_s(&rho, &sigma)?;
        let mut report = compute_deltas(&margins_of_state(&rho), &margins_of_state(&sigma))?;

        match ds.finite() {
            Some(v) => {
                if !(report.delta_bar - th.sandwich_slack <= v
                    && v <= report.delta + th.sandwich_slack)
                {
                    return Err(CampaignError::InternalAssertion(format!(
                        "sandwich violated at sample {i}: {} ≤ {} ≤ {} fails",
                        report.delta_bar, v, report.delta
                    )));
                }
                report.delta_s = Some(v);
                if v < -th.negative_cut {
                    agg.potentials.push(PotentialCounterexample {
                        sample_index: i,
                        quantity: "delta_s".into(),
                        value: v,
                        inputs: Some(report.inputs.clone()),
                    });
                }
            }
            None => {
                agg.support_violations += 1;
                report.delta_s = Some(f64::INFINITY);
            }
        }

        for (name, value) in report.named_values() {
            agg.observe(name, i, value, Some(&report.inputs), th.negative_cut);
        }
        agg.retainer.offer(
            retention_priority(seed, i),
            RetainedRow { index: i, report },
        );
        Ok(())
    })?;

    let mut summary = agg.into_summary(config);
    summary.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(summary)
}

/// Orbit-interval verification across dimensions 2, 3, 4: n_samples pairs
/// per dimension, each probed with Haar unitaries plus the two explicit
/// alignments. Quantities are margins — negative beyond the slack means a
/// violation, and min_value carries the verdict.
pub fn run_orbit_verify(config: &CampaignConfig) -> Result<CampaignSummary, CampaignError> {
    config.validate()?;
    let start = Instant::now();
    let th = &config.thresholds;
    let seed = config.master_seed;
    let per_dim = config.n_samples;
    let dims = [2usize, 3, 4];
    let total = per_dim * dims.len() as u64;

    let agg = parallel_fold(total, config.workers, 0, |agg, j| {
        let dim = dims[(j / per_dim) as usize];
        let mut rng = sample_rng(seed, j);
        let rho = DensityMatrix::ginibre(dim, &mut rng);
        let sigma = DensityMatrix::ginibre_full_rank(dim, &mut rng, th.density_floor);
        let report = verify_orbit_interval(&rho, &sigma, th.haar_per_pair as usize, &mut rng)?;

        let interval_margin = (report.observed_min - report.extremes.min_value)
            .min(report.extremes.max_value - report.observed_max);
        let alignment_margin = -report.alignment_error;
        agg.observe(
            &format!("interval_margin_d{dim}"),
            j,
            interval_margin,
            None,
            th.negative_cut,
        );
        agg.observe(
            &format!("alignment_margin_d{dim}"),
            j,
            alignment_margin,
            None,
            th.negative_cut,
        );
        if report.out_of_interval > 0 || report.alignment_error > th.interval_slack {
            agg.potentials.push(PotentialCounterexample {
                sample_index: j,
                quantity: format!("orbit_violation_d{dim}"),
                value: interval_margin.min(alignment_margin),
                inputs: None,
            });
        }
        Ok(())
    })?;

    let mut summary = agg.into_summary(config);
    summary.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(summary)
}

/// Random search for super-additivity violations: full-rank Ginibre pairs,
/// tracking the most negative △S. The best pair is pinned bit-exactly as a
/// regression fixture.
pub fn run_counterexample_search(
    config: &CampaignConfig,
) -> Result<CampaignSummary, CampaignError> {
    config.validate()?;
    let start = Instant::now();
    let th = &config.thresholds;
    let seed = config.master_seed;

    let agg = parallel_fold(config.n_samples, config.workers, 0, |agg, i| {
        let mut rng = sample_rng(seed, i);
        let rho = DensityMatrix::ginibre_full_rank(4, &mut rng, th.density_floor);
        let sigma = DensityMatrix::ginibre_full_rank(4, &mut rng, th.density_floor);
        match delta_s(&rho, &sigma)?.finite() {
            Some(v) => {
                agg.observe("delta_s", i, v, None, th.negative_cut);
                agg.offer_best(i, v, &rho, &sigma);
                if v < th.counterexample_cut {
                    agg.potentials.push(PotentialCounterexample {
                        sample_index: i,
                        quantity: "delta_s".into(),
                        value: v,
                        inputs: None,
                    });
                }
            }
            None => agg.support_violations += 1,
        }
        Ok(())
    })?;

    let mut summary = agg.into_summary(config);
    summary.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(summary)
}

/// Local-unitary optimization campaign: multistart gradient ascent over
/// U(2)⊗U(2) per pair, then the existence inequality is checked at the
/// best found factors. `local_superadditivity_margin` < 0 would be counterevidence;
/// `subgroup_margin` < 0 would violate the orbit bound.
pub fn run_local_opt(config: &CampaignConfig) -> Result<CampaignSummary, CampaignError> {
    config.validate()?;
    let start = Instant::now();
    let th = &config.thresholds;
    let seed = config.master_seed;

    let agg = parallel_fold(config.n_samples, config.workers, 0, |agg, i| {
        let mut rng = sample_rng(seed, i);
        let rho = DensityMatrix::ginibre(4, &mut rng);
        let sigma = DensityMatrix::ginibre_full_rank(4, &mut rng, th.density_floor);
        let extremes = orbit_extremes(
            &Spectrum::new(rho.eigenvalues_desc()).expect("state spectrum"),
            &Spectrum::new(sigma.eigenvalues_desc()).expect("state spectrum"),
        )
        .map_err(CampaignError::Orbit)?;

        let opt_config = OptimizerConfig {
            mode: Mode::Maximize,
            manifold: Manifold::LocalProduct,
            ..OptimizerConfig::default()
        };
        let mut best: Option<crate::unitary_opt::OptimizerTrace> = None;
        for _ in 0..th.multistart {
            let trace = optimize_local(&rho, &sigma, &opt_config, &mut rng)?;
            let better = match &best {
                None => true,
                Some(b) => trace.final_objective() > b.final_objective(),
            };
            if better {
                best = Some(trace);
            }
        }
        let best = best.expect("multistart ≥ 1");
        let lhs = best.final_objective();
        let (u_a, u_b) = best
            .final_factors
            .as_ref()
            .expect("local trace has factors");

        let reduce = |m: &DensityMatrix, keep: Subsystem| -> DensityMatrix {
            DensityMatrix::new(partial_trace(m.matrix(), 2, 2, keep).expect("4 = 2x2"))
                .expect("margins of a state are states")
        };
        let rhs_a = relative_entropy_quantum(
            &reduce(&rho, Subsystem::A).conjugated_by(u_a),
            &reduce(&sigma, Subsystem::A),
            DEFAULT_SUPPORT_TOL,
        )
        .expect("dims match")
        .as_bits();
        let rhs_b = relative_entropy_quantum(
            &reduce(&rho, Subsystem::B).conjugated_by(u_b),
            &reduce(&sigma, Subsystem::B),
            DEFAULT_SUPPORT_TOL,
        )
        .expect("dims match")
        .as_bits();

        let superadditivity_margin = lhs - (rhs_a + rhs_b);
        let subgroup_margin = extremes.max_value - lhs;
        agg.observe(
            "local_superadditivity_margin",
            i,
            superadditivity_margin,
            None,
            th.negative_cut,
        );
        agg.observe("subgroup_margin", i, subgroup_margin, None, th.negative_cut);
        agg.observe("best_local_max", i, lhs, None, th.negative_cut);
        if superadditivity_margin < -th.interval_slack {
            agg.potentials.push(PotentialCounterexample {
                sample_index: i,
                quantity: "local_superadditivity_margin".into(),
                value: superadditivity_margin,
                inputs: None,
            });
        }
        if subgroup_margin < -th.interval_slack {
            return Err(CampaignError::InternalAssertion(format!(
                "local optimum exceeded the orbit maximum at sample {i}: {lhs} > {}",
                extremes.max_value
            )));
        }
        Ok(())
    })?;

    let mut summary = agg.into_summary(config);
    summary.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::report;

    fn config(experiment: Experiment, n: u64, seed: u64) -> CampaignConfig {
        CampaignConfig::new(experiment, n, seed)
    }

    #[test]
    fn spectra_counts_sum_and_rows_are_capped() {
        let mut cfg = config(Experiment::SpectraDeltas, 300, 7);
        cfg.thresholds.row_cap = 100;
        let summary = run_spectra_deltas(&cfg).unwrap();
        for (name, q) in &summary.quantities {
            assert_eq!(q.total(), 300, "{name}");
        }
        assert_eq!(summary.retained.len(), 100);
        // Negative delta / delta_mix samples are data, not failures; at this
        // scale they are overwhelmingly unlikely but the artifact list must
        // stay consistent with the counts either way.
        let negatives = summary.quantity("delta").negative + summary.quantity("delta_mix").negative;
        assert_eq!(summary.potential_counterexamples.len() as u64, negatives);
        // The chain forces barΔ at or below every other quantity.
        assert!(
            summary.quantity("delta_bar").min_value
                <= summary.quantity("delta_min").min_value + 1e-12
        );
        // Tracked extremes reproduce from their digests.
        for (name, q) in &summary.quantities {
            let digest = q.min_input_digest.as_ref().unwrap();
            let inputs = digest.inputs.as_ref().unwrap();
            let again = compute_deltas(&inputs.rho, &inputs.sigma).unwrap();
            let value = again
                .named_values()
                .iter()
                .find(|(n, _)| n == name)
                .unwrap()
                .1;
            assert!((value - q.min_value).abs() <= 1e-12, "{name}");
        }
    }

    #[test]
    fn spectra_deterministic_across_worker_counts() {
        let mut a = config(Experiment::SpectraDeltas, 500, 42);
        a.thresholds.row_cap = 200;
        let mut b = a.clone();
        b.workers = 4;
        let sa = run_spectra_deltas(&a).unwrap();
        let sb = run_spectra_deltas(&b).unwrap();
        assert_eq!(report::summary_json(&sa), report::summary_json(&sb));
        assert_eq!(
            report::spectra_csv(&sa.retained),
            report::spectra_csv(&sb.retained)
        );
    }

    #[test]
    fn state_deltas_sandwich_and_fixture_sample() {
        let cfg = config(Experiment::StateDeltas, 50, 11);
        let summary = run_state_deltas(&cfg).unwrap();
        assert_eq!(summary.quantity("delta_s").total(), 50);
        // Sample 0 is ρ = σ: exactly neutral.
        let row0 = &summary.retained.iter().find(|r| r.index == 0);
        if let Some(r) = row0 {
            assert!(r.report.delta_s.unwrap().abs() <= 1e-10);
        }
        assert_eq!(summary.support_violations, 0);
    }

    #[test]
    fn orbit_verify_small_run_is_clean() {
        let mut cfg = config(Experiment::OrbitVerify, 5, 13);
        cfg.thresholds.haar_per_pair = 50;
        cfg.workers = 3;
        let summary = run_orbit_verify(&cfg).unwrap();
        for dim in [2, 3, 4] {
            let q = summary.quantity(&format!("interval_margin_d{dim}"));
            assert_eq!(q.total(), 5);
            assert!(q.min_value >= -cfg.thresholds.interval_slack);
            let a = summary.quantity(&format!("alignment_margin_d{dim}"));
            assert!(a.min_value >= -cfg.thresholds.interval_slack);
        }
        assert!(summary.potential_counterexamples.is_empty());
    }

    #[test]
    fn counterexample_search_tracks_best() {
        let cfg = config(Experiment::Counterexample, 200, 5);
        let summary = run_counterexample_search(&cfg).unwrap();
        let fixture = summary.fixture.as_ref().expect("fixture present");
        assert_eq!(
            fixture.delta_s.to_bits(),
            summary.quantity("delta_s").min_value.to_bits()
        );
        let recomputed = fixture.recompute().unwrap();
        assert!((recomputed - fixture.delta_s).abs() <= 1e-12);
    }

    #[test]
    fn local_opt_small_run() {
        let mut cfg = config(Experiment::LocalOpt, 2, 3);
        cfg.thresholds.multistart = 3;
        cfg.workers = 2;
        let summary = run_local_opt(&cfg).unwrap();
        assert!(summary.quantity("subgroup_margin").min_value >= -1e-9);
        assert_eq!(summary.quantity("local_superadditivity_margin").total(), 2);
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = config(Experiment::SpectraDeltas, 0, 1);
        assert!(matches!(
            run_spectra_deltas(&cfg),
            Err(CampaignError::InvalidConfig(_))
        ));
        let mut cfg = config(Experiment::SpectraDeltas, 10, 1);
        cfg.workers = 0;
        assert!(matches!(
            run_spectra_deltas(&cfg),
            Err(CampaignError::InvalidConfig(_))
        ));
    }
}
