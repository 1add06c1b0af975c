use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bbgap::csvio::{read_trajectory_file, write_filled, write_trajectory};
use bbgap::estimator::{estimate_sigma_pooled, SearchConfig};
use bbgap::experiment::{run_experiment, ExperimentConfig};
use bbgap::gapfill::{fill_gap, FillMethod, DEFAULT_REALISATIONS};
use bbgap::{
    excise_gap, generate, path_length, radius_of_gyration, Error, GappedTrajectory, ModelSpec,
    Trajectory,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "bbgap",
    version,
    about = "Brownian-bridge gap filling for 2-D trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic trajectory as t,x,y CSV.
    Simulate(SimulateArgs),
    /// Delete a run of points, keeping both anchors.
    Gap(GapArgs),
    /// Fill a gap by bridge or straight line.
    Fill(FillArgs),
    /// Estimate the diffusion coefficient of a trajectory.
    Estimate(InputArgs),
    /// Path length and radius of gyration of a trajectory.
    Metrics(InputArgs),
    /// Run a batch experiment and write records CSV plus summary JSON.
    Experiment(ExperimentArgs),
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("{v:?} is not a number"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    model: String,
    /// Model parameter, repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GapSelect {
    /// Index of the first deleted point.
    #[arg(long, requires = "gap_count")]
    gap_start: Option<usize>,
    #[arg(long, requires = "gap_start")]
    gap_count: Option<usize>,
}

#[derive(Args)]
struct GapArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    gap_start: usize,
    #[arg(long)]
    gap_count: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Bridge,
    Linear,
}

#[derive(Args)]
struct FillArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    gap: GapSelect,
    #[arg(long, value_enum, default_value_t = Method::Bridge)]
    method: Method,
    /// Use this diffusion coefficient instead of estimating it.
    #[arg(long)]
    sigma: Option<f64>,
    /// Bridge draws averaged for the RoG estimate.
    #[arg(long, default_value_t = DEFAULT_REALISATIONS)]
    realisations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment configuration.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration: path-length or rog.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for records.csv and summary.json (overrides paths in the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(_) | Error::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn emit_trajectory(traj: &Trajectory, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => write_trajectory(io::BufWriter::new(fs::File::create(path)?), traj)?,
        None => write_trajectory(io::stdout().lock(), traj)?,
    }
    Ok(())
}

fn print_json(value: &serde_json::Value) -> CmdResult {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn simulate(a: SimulateArgs) -> CmdResult {
    let spec = ModelSpec::from_params(&a.model, &a.params)?;
    let traj = generate(&spec, a.steps, a.seed)?;
    emit_trajectory(&traj, a.out.as_deref())
}

fn gap(a: GapArgs) -> CmdResult {
    let traj = read_trajectory_file(&a.input)?;
    let gapped = excise_gap(&traj, a.gap_start, a.gap_count)?;
    emit_trajectory(&gapped.observed(), a.out.as_deref())
}

/// The single run of missing integer timestamps between the first and last.
fn detect_gap(traj: &Trajectory) -> Result<GappedTrajectory, Failure> {
    let pts = traj.points();
    if let Some(p) = pts.iter().find(|p| p.t.fract() != 0.0) {
        return Err(Failure::Data(format!(
            "gap auto-detection needs integer timestamps, found t={}",
            p.t
        )));
    }
    let holes: Vec<usize> = (1..pts.len())
        .filter(|&i| pts[i].t - pts[i - 1].t > 1.0)
        .collect();
    let split = match holes.as_slice() {
        [i] => *i,
        [] => {
            return Err(Failure::Data(
                "no missing timestamps found; use --gap-start/--gap-count".into(),
            ))
        }
        _ => {
            return Err(Failure::Data(format!(
                "found {} separate gaps; only one gap per file is supported",
                holes.len()
            )))
        }
    };
    let (lo, hi) = (pts[split - 1].t, pts[split].t);
    let missing = (lo as i64 + 1..hi as i64).map(|t| t as f64).collect();
    let before = traj.slice(0, split)?;
    let after = traj.slice(split, pts.len())?;
    Ok(GappedTrajectory::new(before, after, missing)?)
}

fn fill(a: FillArgs) -> CmdResult {
    let traj = read_trajectory_file(&a.input)?;
    let gapped = match (a.gap.gap_start, a.gap.gap_count) {
        (Some(start), Some(count)) => excise_gap(&traj, start, count)?,
        _ => detect_gap(&traj)?,
    };
    let search = SearchConfig::default();
    let method = match a.method {
        Method::Linear => FillMethod::Linear,
        Method::Bridge => FillMethod::Bridge {
            realisations: a.realisations,
            sigma_override: a.sigma,
        },
    };
    let outcome = fill_gap(&gapped, &method, &search, a.seed)?;
    // Report the diffusion estimate for linear fills too, when the data allow one.
    let (sigma, clamped, origin) = match (a.sigma, outcome.sigma_estimate) {
        (Some(s), _) => (Some(s), false, "given"),
        (None, Some(est)) => (Some(est.sigma_m), est.clamped, "estimated"),
        (None, None) => match estimate_sigma_pooled(gapped.observed_segments(), &search) {
            Ok(est) => (Some(est.sigma_m), est.clamped, "estimated"),
            Err(_) => (None, false, "unavailable"),
        },
    };
    write_filled(
        io::BufWriter::new(fs::File::create(&a.out)?),
        &outcome.filled,
    )?;
    print_json(&json!({
        "method": method.source().as_str(),
        "missing_points": gapped.missing_times().len(),
        "sigma_hat": sigma,
        "sigma_source": origin,
        "sigma_clamped": clamped,
        "estimated_length": outcome.estimated_length,
        "displacement": outcome.displacement,
        "rog_mean": outcome.rog.mean,
        "rog_std_error": outcome.rog.std_error,
        "realisations": outcome.rog.realisations,
    }))
}

fn estimate(a: InputArgs) -> CmdResult {
    let traj = read_trajectory_file(&a.input)?;
    let segments = match detect_gap(&traj) {
        Ok(g) => vec![g.before().clone(), g.after().clone()],
        Err(_) => vec![traj],
    };
    let est = estimate_sigma_pooled(&segments, &SearchConfig::default())?;
    print_json(&json!({
        "sigma_hat": est.sigma_m,
        "log_likelihood": est.log_likelihood_at_max,
        "triples": est.n_triples,
        "skipped": est.skipped,
        "clamped": est.clamped,
    }))
}

fn metrics(a: InputArgs) -> CmdResult {
    let traj = read_trajectory_file(&a.input)?;
    print_json(&json!({
        "path_length": path_length(&traj),
        "rog": radius_of_gyration(&traj),
        "point_count": traj.len(),
    }))
}

fn experiment(a: ExperimentArgs) -> CmdResult {
    let mut cfg = match (&a.config, &a.preset) {
        (Some(path), _) => ExperimentConfig::from_json(&fs::read_to_string(path)?)?,
        (None, Some(name)) => ExperimentConfig::preset(name)?,
        (None, None) => unreachable!("clap requires one of --config/--preset"),
    };
    if let Some(r) = a.replicates {
        cfg.replicates = r;
    }
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    let (records, summary) = match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            (dir.join("records.csv"), dir.join("summary.json"))
        }
        None => match (&cfg.outputs.records, &cfg.outputs.summary) {
            (Some(r), Some(s)) => (r.clone(), s.clone()),
            _ => {
                return Err(Failure::Usage(
                    "give --out or set outputs.records and outputs.summary in the config".into(),
                ))
            }
        },
    };
    let report = run_experiment(&cfg)?;
    report.write_files(&records, &summary)?;
    print_json(&json!({
        "records": records,
        "summary": summary,
        "record_count": report.records.len(),
    }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Gap(a) => gap(a),
        Command::Fill(a) => fill(a),
        Command::Estimate(a) => estimate(a),
        Command::Metrics(a) => metrics(a),
        Command::Experiment(a) => experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("bbgap: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("bbgap: {msg}");
            ExitCode::from(3)
        }
    }
}
