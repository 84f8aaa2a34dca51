//! Command-line front end: ingest, earlywarn, forecast, backtest, report,
//! and synth over file-based data bundles.
//!
//! Exit codes: 0 success, 1 input error (files, schemas, configuration),
//! 2 analysis error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flowcast_core::error::ErrorKind;
use flowcast_core::io::{
    cmd_backtest, cmd_earlywarn, cmd_forecast, cmd_ingest, cmd_report, cmd_synth, CommandOutcome,
    RunConfig, SynthBundleConfig,
};
use flowcast_core::timeseries::parse_date;

#[derive(Parser)]
#[command(
    name = "flowcast",
    version,
    about = "Early-warning signals and short-term forecasts for weekly dyadic flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Key-value configuration file (dotted parameter names).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Origin country code; repeatable.
    #[arg(long = "origin", value_name = "CC")]
    origins: Vec<String>,
    /// Destination country code; repeatable.
    #[arg(long = "dest", value_name = "CC")]
    destinations: Vec<String>,
    /// Analysis cutoff date (YYYY-MM-DD); data after its week is ignored.
    #[arg(long = "as-of", value_name = "DATE")]
    as_of: Option<String>,
    /// Random seed for permutation tests and forests.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Also write SVG charts.
    #[arg(long)]
    svg: bool,
    /// Applications CSV (overrides the config file).
    #[arg(long, value_name = "PATH")]
    applications: Option<PathBuf>,
    /// Decisions CSV.
    #[arg(long, value_name = "PATH")]
    decisions: Option<PathBuf>,
    /// Irregular-border-crossing CSV.
    #[arg(long, value_name = "PATH")]
    ibc: Option<PathBuf>,
    /// Events CSV.
    #[arg(long, value_name = "PATH")]
    events: Option<PathBuf>,
    /// Search-trends CSV.
    #[arg(long, value_name = "PATH")]
    trends: Option<PathBuf>,
    /// Event weight table CSV (defaults to the embedded table).
    #[arg(long, value_name = "PATH")]
    weights: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the data bundle and write an ingest summary.
    Ingest(CommonArgs),
    /// Per-origin early-warning reports (signals, lead-lags, alert levels).
    Earlywarn(CommonArgs),
    /// Per-dyad forecasts at the as-of week.
    Forecast(CommonArgs),
    /// Week-by-week simulated forecasting against the benchmark.
    Backtest(CommonArgs),
    /// Heatmaps and the traffic-light table from a previous backtest.
    Report(CommonArgs),
    /// Generate a synthetic planted-truth bundle.
    Synth {
        /// Output directory for the generated CSVs.
        #[arg(long, value_name = "DIR", default_value = "out")]
        out: PathBuf,
        /// Number of origin->destination dyads.
        #[arg(long, default_value_t = 10)]
        dyads: usize,
        /// Weeks of data per dyad.
        #[arg(long, default_value_t = 170)]
        weeks: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Noise sd of the target around the planted signal.
        #[arg(long, default_value_t = 5.0)]
        noise: f64,
        /// Planted covariate lead in weeks.
        #[arg(long, default_value_t = 4)]
        lag: usize,
    },
}

fn build_config(args: &CommonArgs) -> flowcast_core::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    cfg.origins.extend(args.origins.iter().cloned());
    cfg.destinations.extend(args.destinations.iter().cloned());
    if let Some(date) = &args.as_of {
        cfg.as_of = Some(parse_date(date)?);
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if args.svg {
        cfg.emit_svg = true;
    }
    let paths = &mut cfg.paths;
    for (slot, flag) in [
        (&mut paths.applications, &args.applications),
        (&mut paths.decisions, &args.decisions),
        (&mut paths.ibc, &args.ibc),
        (&mut paths.events, &args.events),
        (&mut paths.trends, &args.trends),
        (&mut paths.weights, &args.weights),
    ] {
        if let Some(p) = flag {
            *slot = Some(p.clone());
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report_outcome(outcome: &CommandOutcome) {
    for diag in &outcome.diagnostics {
        eprintln!("warning: {diag}");
    }
    for file in &outcome.files {
        println!("wrote {}", file.display());
    }
}

fn run() -> flowcast_core::Result<CommandOutcome> {
    let cli = Cli::parse();
    match cli.command {
        Command::Ingest(args) => cmd_ingest(&build_config(&args)?),
        Command::Earlywarn(args) => cmd_earlywarn(&build_config(&args)?),
        Command::Forecast(args) => cmd_forecast(&build_config(&args)?),
        Command::Backtest(args) => cmd_backtest(&build_config(&args)?),
        Command::Report(args) => cmd_report(&build_config(&args)?),
        Command::Synth {
            out,
            dyads,
            weeks,
            seed,
            noise,
            lag,
        } => cmd_synth(&SynthBundleConfig {
            out_dir: out,
            dyads,
            weeks,
            seed,
            noise_sd: noise,
            lag,
            ..Default::default()
        }),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(outcome) => {
            report_outcome(&outcome);
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            match err.kind() {
                ErrorKind::Input => ExitCode::from(1),
                ErrorKind::Analysis => ExitCode::from(2),
            }
        }
    }
}
