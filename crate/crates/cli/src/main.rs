//! `relent` — seeded Monte Carlo campaigns over relative-entropy
//! inequalities for two-qubit spectra.
//!
//! Each campaign subcommand writes a deterministic summary JSON (and, where
//! rows exist, CSV or row JSON) under `--out`; the same (experiment,
//! samples, seed) always produces byte-identical files regardless of
//! `--workers`. Exit codes: 0 success, 2 invalid configuration or input,
//! 3 I/O failure, 4 internal assertion.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use relent_core::campaign::{
    report, run_counterexample_search, run_local_opt, run_orbit_verify, run_spectra_deltas,
    run_state_deltas, svg, CampaignConfig, CampaignError, CampaignSummary, Experiment,
};

#[derive(Parser)]
#[command(
    name = "relent",
    version,
    about = "Relative-entropy inequality campaigns for two-qubit spectra",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample admissible spectrum triples and tabulate the five Δ values.
    SpectraDeltas(RunArgs),
    /// Sample Ginibre two-qubit pairs; adds △S and checks barΔ ≤ △S ≤ Δ.
    StateDeltas(RunArgs),
    /// Verify the orbit interval of S(UρU†‖σ) at dimensions 2, 3, 4.
    OrbitVerify(RunArgs),
    /// Random search for super-additivity violations (most negative △S).
    Counterexample(RunArgs),
    /// Multistart gradient ascent over local unitaries U_A ⊗ U_B.
    LocalOpt(RunArgs),
    /// Render SVG scatter charts from a previously written CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Sample count (pairs per dimension for orbit-verify); defaults to a
    /// per-experiment scale.
    #[arg(long)]
    samples: Option<u64>,
    /// Master seed; all randomness derives from (seed, sample index).
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; never affects results, only wall time.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Row output format for experiments that retain rows.
    #[arg(long, value_enum, default_value_t = RowFormat::Csv)]
    format: RowFormat,
}

#[derive(Args)]
struct PlotArgs {
    /// Directory holding the CSV and receiving the SVGs.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Explicit CSV path; defaults to the spectra or state CSV in --out.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RowFormat {
    Csv,
    Json,
}

enum CliError {
    Campaign(CampaignError),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl From<CampaignError> for CliError {
    fn from(e: CampaignError) -> Self {
        CliError::Campaign(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Campaign(CampaignError::InvalidConfig(_))
            | CliError::Campaign(CampaignError::Malformed(_)) => 2,
            CliError::Io { .. } => 3,
            CliError::Campaign(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Campaign(e) => format!("error: {e}"),
            CliError::Io { path, source } => format!("I/O error on {}: {source}", path.display()),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn default_samples(experiment: Experiment) -> u64 {
    match experiment {
        Experiment::SpectraDeltas => 1_000_000,
        Experiment::StateDeltas => 10_000,
        Experiment::OrbitVerify => 100,
        Experiment::Counterexample => 10_000,
        Experiment::LocalOpt => 100,
    }
}

fn run_campaign(experiment: Experiment, args: &RunArgs) -> Result<(), CliError> {
    let mut config = CampaignConfig::new(
        experiment,
        args.samples.unwrap_or_else(|| default_samples(experiment)),
        args.seed,
    );
    config.output_dir = args.out.clone();
    config.workers = args.workers;

    let summary = match experiment {
        Experiment::SpectraDeltas => run_spectra_deltas(&config)?,
        Experiment::StateDeltas => run_state_deltas(&config)?,
        Experiment::OrbitVerify => run_orbit_verify(&config)?,
        Experiment::Counterexample => run_counterexample_search(&config)?,
        Experiment::LocalOpt => run_local_opt(&config)?,
    };

    fs::create_dir_all(&config.output_dir).map_err(|source| CliError::Io {
        path: config.output_dir.clone(),
        source,
    })?;

    let name = experiment.name();
    let summary_path = config.output_dir.join(format!("{name}_summary.json"));
    write_file(&summary_path, &report::summary_json(&summary))?;
    let mut written = vec![summary_path.display().to_string()];

    if !summary.retained.is_empty() {
        match args.format {
            RowFormat::Csv => {
                let csv = match experiment {
                    Experiment::StateDeltas => report::state_csv(&summary.retained),
                    _ => report::spectra_csv(&summary.retained),
                };
                let path = config.output_dir.join(format!("{name}.csv"));
                write_file(&path, &csv)?;
                written.push(path.display().to_string());
            }
            RowFormat::Json => {
                let path = config.output_dir.join(format!("{name}_rows.json"));
                write_file(&path, &report::rows_json(&summary.retained))?;
                written.push(path.display().to_string());
            }
        }
    }

    if let Some(fixture) = &summary.fixture {
        let path = config.output_dir.join("counterexample_fixture.json");
        write_file(&path, &fixture.to_json())?;
        written.push(path.display().to_string());
    }

    if !summary.potential_counterexamples.is_empty() {
        let path = config.output_dir.join("potential_counterexamples.json");
        write_file(
            &path,
            &report::potential_counterexamples_json(&summary.potential_counterexamples),
        )?;
        written.push(path.display().to_string());
        for p in &summary.potential_counterexamples {
            println!(
                "POTENTIAL-COUNTEREXAMPLE sample {} {} = {:.6e}",
                p.sample_index, p.quantity, p.value
            );
        }
    }

    print_summary(&summary);
    println!("wrote: {}", written.join(", "));
    Ok(())
}

fn print_summary(summary: &CampaignSummary) {
    println!(
        "{} finished: {} samples, seed {}, {:.2}s",
        summary.experiment, summary.n_samples, summary.seed, summary.runtime_seconds
    );
    for (name, q) in &summary.quantities {
        println!(
            "  {name}: negative {} / zero {} / positive {}, min {:.6e}, max {:.6e}",
            q.negative, q.zero, q.positive, q.min_value, q.max_value
        );
    }
    if summary.resample_events > 0 {
        println!(
            "  joint spectra resampled {} times",
            summary.resample_events
        );
    }
    if summary.support_violations > 0 {
        println!("  support violations: {}", summary.support_violations);
    }
    if let Some(f) = &summary.fixture {
        println!(
            "  best pair: sample {} with delta_s {:.6e}",
            f.sample_index, f.delta_s
        );
    }
}

fn run_plot(args: &PlotArgs) -> Result<(), CliError> {
    let input = match &args.input {
        Some(p) => p.clone(),
        None => {
            let spectra = args.out.join("spectra-deltas.csv");
            let state = args.out.join("state-deltas.csv");
            if spectra.exists() {
                spectra
            } else if state.exists() {
                state
            } else {
                return Err(CliError::Campaign(CampaignError::InvalidConfig(format!(
                    "no spectra-deltas.csv or state-deltas.csv under {}; pass --input",
                    args.out.display()
                ))));
            }
        }
    };
    let text = fs::read_to_string(&input).map_err(|source| CliError::Io {
        path: input.clone(),
        source,
    })?;
    let parsed = report::parse_csv(&text)?;
    let indices = parsed
        .column("index")
        .ok_or_else(|| CampaignError::Malformed("CSV lacks an index column".into()))?
        .to_vec();
    let x_max = indices.iter().cloned().fold(0.0, f64::max) + 1.0;

    fs::create_dir_all(&args.out).map_err(|source| CliError::Io {
        path: args.out.clone(),
        source,
    })?;
    let mut wrote_any = false;
    for (i, name) in parsed.header.iter().enumerate() {
        if !name.starts_with("delta") {
            continue;
        }
        let points: Vec<(f64, f64)> = indices
            .iter()
            .cloned()
            .zip(parsed.columns[i].iter().cloned())
            .collect();
        let chart = svg::scatter_svg(name, &points, x_max);
        let path = args.out.join(format!("{name}.svg"));
        write_file(&path, &chart)?;
        println!("wrote {}", path.display());
        wrote_any = true;
    }
    if !wrote_any {
        return Err(CliError::Campaign(CampaignError::Malformed(format!(
            "no delta columns found in {}",
            input.display()
        ))));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::SpectraDeltas(args) => run_campaign(Experiment::SpectraDeltas, args),
        Command::StateDeltas(args) => run_campaign(Experiment::StateDeltas, args),
        Command::OrbitVerify(args) => run_campaign(Experiment::OrbitVerify, args),
        Command::Counterexample(args) => run_campaign(Experiment::Counterexample, args),
        Command::LocalOpt(args) => run_campaign(Experiment::LocalOpt, args),
        Command::Plot(args) => run_plot(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
