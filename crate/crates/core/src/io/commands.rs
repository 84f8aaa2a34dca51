//! The operational commands behind the CLI: ingest, earlywarn, forecast,
//! backtest, report, synth. Each writes its artifacts under the configured
//! output directory and returns the list of files written.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::backtest::{confidence_band, run_backtest, BacktestResult};
use crate::earlywarn::{alert_summary, filter_panel, EarlyWarningReport};
use crate::error::{Error, Result};
use crate::forecast::{forecast_applications, DyadForecast};
use crate::io::bundle::{load, write_bundle, BundleAnalyzer};
use crate::io::config::RunConfig;
use crate::io::reports::{
    forecast_rows, write_backtest_csv, write_earlywarn_csv, write_forecast_csv, write_heatmap_csv,
    write_json, write_traffic_csv, CommandOutcome,
};
use crate::io::svg::{backtest_chart, heatmap_chart};
use crate::io::synthgen::{synth_bundle, SynthBundleConfig};
use crate::ranking::heatmap_matrix;
use crate::rng::derive_seed;
use crate::timeseries::{months_to_weeks, Panel, WeekIndex};

fn ensure_out(cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    Ok(())
}

/// Cuts a panel to the analysis window: truncated at the as-of date (or the
/// target's last observed week, whichever is earlier), then capped at the
/// trailing back.w months.
fn analysis_panel(panel: &Panel, cfg: &RunConfig) -> Result<Panel> {
    let last_target = panel
        .last_target_week()
        .ok_or_else(|| Error::InsufficientData("target has no observations".into()))?;
    let cutoff = match cfg.as_of {
        Some(date) => last_target.min(WeekIndex::from_date(date)),
        None => last_target,
    };
    let panel = panel.truncate_at(cutoff)?;
    panel.tail(months_to_weeks(cfg.ew.back_w).min(panel.n_weeks()))
}

fn origins_to_run(cfg: &RunConfig, analyzer: &BundleAnalyzer) -> Vec<String> {
    if cfg.origins.is_empty() {
        analyzer.origins()
    } else {
        cfg.origins.clone()
    }
}

fn dyads_to_run(cfg: &RunConfig, analyzer: &BundleAnalyzer) -> Vec<(String, String)> {
    let mut dyads = Vec::new();
    for origin in origins_to_run(cfg, analyzer) {
        let dests = if cfg.destinations.is_empty() {
            analyzer.destinations_for(&origin)
        } else {
            cfg.destinations.clone()
        };
        for dest in dests {
            dyads.push((origin.clone(), dest));
        }
    }
    dyads
}

#[derive(Debug, Serialize)]
struct IngestSummary {
    application_series: usize,
    recognition_series: usize,
    ibc_series: usize,
    event_records: usize,
    trend_series: usize,
    origins: Vec<String>,
    diagnostics: Vec<String>,
}

/// Validates the bundle and writes a summary of what was read.
pub fn cmd_ingest(cfg: &RunConfig) -> Result<CommandOutcome> {
    ensure_out(cfg)?;
    let analyzer = load(cfg)?;
    let mut outcome = CommandOutcome::default();
    let summary = IngestSummary {
        application_series: analyzer.bundle.applications.len(),
        recognition_series: analyzer.bundle.recognition.len(),
        ibc_series: analyzer.bundle.ibc.len(),
        event_records: analyzer.bundle.events.len(),
        trend_series: analyzer.bundle.trends.len(),
        origins: analyzer.origins(),
        diagnostics: analyzer.bundle.diagnostics.clone(),
    };
    let path = cfg.out_dir.join("ingest_summary.json");
    write_json(&summary, &path)?;
    outcome.add(path);
    outcome.diagnostics = analyzer.bundle.diagnostics.clone();
    Ok(outcome)
}

#[derive(Debug, Serialize)]
struct OriginError {
    origin: String,
    error: String,
}

/// Per-origin early-warning reports (JSON per origin plus one summary CSV).
/// Failures are isolated per origin.
pub fn cmd_earlywarn(cfg: &RunConfig) -> Result<CommandOutcome> {
    ensure_out(cfg)?;
    let analyzer = load(cfg)?;
    let origins = origins_to_run(cfg, &analyzer);
    let mut outcome = CommandOutcome::default();

    let results: Vec<(String, Result<EarlyWarningReport>)> = origins
        .par_iter()
        .map(|origin| {
            let run = || -> Result<EarlyWarningReport> {
                let (panel, diags) = analyzer.origin_panel(origin)?;
                let panel = analysis_panel(&panel, cfg)?;
                let mut report = alert_summary(
                    &panel,
                    &cfg.ew,
                    origin,
                    derive_seed(cfg.seed, &["earlywarn", origin]),
                )?;
                report.drops.sort_by(|a, b| a.id.cmp(&b.id));
                let _ = diags;
                Ok(report)
            };
            (origin.clone(), run())
        })
        .collect();

    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for (origin, result) in results {
        match result {
            Ok(report) => {
                let path = cfg.out_dir.join(format!("earlywarn_{origin}.json"));
                write_json(&report, &path)?;
                outcome.add(path);
                // The composite Push Factor Index for the origin, when any
                // events were ingested for it.
                if let Some(indices) = analyzer.indices.country(&origin) {
                    let pfi = crate::events::push_factor_index(indices);
                    let path = cfg.out_dir.join(format!("pfi_{origin}.csv"));
                    let mut f = std::fs::File::create(&path)?;
                    use std::io::Write;
                    writeln!(f, "week,pfi")?;
                    for (week, value) in pfi.iter() {
                        if let Some(v) = value {
                            writeln!(f, "{week},{v:.6}")?;
                        }
                    }
                    outcome.add(path);
                }
                reports.push(report);
            }
            Err(err) => {
                outcome
                    .diagnostics
                    .push(format!("{origin}: {err}"));
                errors.push(OriginError {
                    origin,
                    error: err.to_string(),
                });
            }
        }
    }
    let csv_path = cfg.out_dir.join("earlywarn.csv");
    write_earlywarn_csv(&reports, &csv_path)?;
    outcome.add(csv_path);
    if !errors.is_empty() {
        let path = cfg.out_dir.join("earlywarn_errors.json");
        write_json(&errors, &path)?;
        outcome.add(path);
    }
    if reports.is_empty() && !origins.is_empty() {
        return Err(Error::InsufficientData(
            "early warning failed for every origin".into(),
        ));
    }
    Ok(outcome)
}

fn forecast_one(
    cfg: &RunConfig,
    analyzer: &BundleAnalyzer,
    origin: &str,
    dest: &str,
) -> Result<DyadForecast> {
    let (panel, _) = analyzer.dyad_panel(origin, dest)?;
    let panel = analysis_panel(&panel, cfg)?;
    let seed = derive_seed(cfg.seed, &["dyad", origin, dest]);
    let ew = alert_summary(&panel, &cfg.ew, origin, seed)?;
    let filtered = filter_panel(&panel, &cfg.ew)?;
    forecast_applications(&filtered.panel, &cfg.fc, &ew, origin, dest)
}

/// Per-dyad forecasts at the as-of week: one CSV/JSON row per horizon.
pub fn cmd_forecast(cfg: &RunConfig) -> Result<CommandOutcome> {
    ensure_out(cfg)?;
    let analyzer = load(cfg)?;
    let dyads = dyads_to_run(cfg, &analyzer);
    let results: Vec<(String, String, Result<DyadForecast>)> = dyads
        .par_iter()
        .map(|(origin, dest)| {
            (
                origin.clone(),
                dest.clone(),
                forecast_one(cfg, &analyzer, origin, dest),
            )
        })
        .collect();
    let rows = forecast_rows(&results);
    let mut outcome = CommandOutcome::default();
    let csv_path = cfg.out_dir.join("forecast.csv");
    write_forecast_csv(&rows, &csv_path)?;
    outcome.add(csv_path);
    let json_path = cfg.out_dir.join("forecast.json");
    write_json(&rows, &json_path)?;
    outcome.add(json_path);
    Ok(outcome)
}

fn backtest_svg(result: &BacktestResult, panel: &Panel, cfg: &RunConfig) -> Result<String> {
    let target = panel.target();
    let x_of = |w: WeekIndex| w.epoch_week() as f64;
    let actual: Vec<(f64, f64)> = target
        .iter()
        .filter_map(|(w, v)| v.map(|v| (x_of(w), v)))
        .collect();
    let band_points = confidence_band(target, cfg.fc.prediction_win.max(4))?;
    let center: Vec<(f64, f64)> = band_points
        .iter()
        .filter_map(|(w, b)| b.map(|b| (x_of(*w), b.center)))
        .collect();
    let band: Vec<(f64, crate::backtest::BandPoint)> = band_points
        .iter()
        .filter_map(|(w, b)| b.map(|b| (x_of(*w), b)))
        .collect();
    let horizon = cfg.fc.n_ahead;
    let model: Vec<(f64, f64)> = result
        .rows
        .iter()
        .filter_map(|r| {
            r.forecasts
                .last()
                .map(|v| (x_of(r.as_of.plus_weeks(horizon as i64)), *v))
        })
        .collect();
    let bench: Vec<(f64, f64)> = result
        .rows
        .iter()
        .filter_map(|r| {
            r.benchmarks
                .last()
                .map(|v| (x_of(r.as_of.plus_weeks(horizon as i64)), *v))
        })
        .collect();
    Ok(backtest_chart(
        &format!("{} to {}: actuals vs {horizon}-week-ahead forecasts", result.origin, result.destination),
        &actual,
        &center,
        &band,
        &model,
        &bench,
    ))
}

/// Week-by-week simulated forecasting for every dyad; per-dyad CSV + JSON,
/// a cross-dyad summary, and optional SVG charts.
pub fn cmd_backtest(cfg: &RunConfig) -> Result<CommandOutcome> {
    ensure_out(cfg)?;
    let analyzer = load(cfg)?;
    let dyads = dyads_to_run(cfg, &analyzer);
    let bt_cfg = cfg.backtest_config();

    type DyadRun = (String, String, Result<(BacktestResult, Panel)>);
    let results: Vec<DyadRun> = dyads
        .par_iter()
        .map(|(origin, dest)| {
            let run = || -> Result<(BacktestResult, Panel)> {
                let (panel, _) = analyzer.dyad_panel(origin, dest)?;
                let result = run_backtest(&panel, &bt_cfg, origin, dest)?;
                Ok((result, panel))
            };
            (origin.clone(), dest.clone(), run())
        })
        .collect();

    let mut outcome = CommandOutcome::default();
    let mut ok_results = Vec::new();
    let mut errors = Vec::new();
    for (origin, dest, result) in results {
        match result {
            Ok((result, panel)) => {
                let stem = format!("backtest_{origin}_{dest}");
                let csv_path = cfg.out_dir.join(format!("{stem}.csv"));
                write_backtest_csv(&result, &csv_path)?;
                outcome.add(csv_path);
                let json_path = cfg.out_dir.join(format!("{stem}.json"));
                write_json(&result, &json_path)?;
                outcome.add(json_path);
                if cfg.emit_svg {
                    let svg = backtest_svg(&result, &panel, cfg)?;
                    let svg_path = cfg.out_dir.join(format!("{stem}.svg"));
                    std::fs::write(&svg_path, svg)?;
                    outcome.add(svg_path);
                }
                ok_results.push(result);
            }
            Err(err) => {
                outcome.diagnostics.push(format!("{origin}->{dest}: {err}"));
                errors.push(OriginError {
                    origin: format!("{origin}->{dest}"),
                    error: err.to_string(),
                });
            }
        }
    }
    let summary_path = cfg.out_dir.join("backtest_summary.json");
    write_json(&ok_results, &summary_path)?;
    outcome.add(summary_path);
    if !errors.is_empty() {
        let path = cfg.out_dir.join("backtest_errors.json");
        write_json(&errors, &path)?;
        outcome.add(path);
    }
    if ok_results.is_empty() && !dyads.is_empty() {
        return Err(Error::InsufficientData(
            "back-test failed for every dyad".into(),
        ));
    }
    Ok(outcome)
}

/// Builds the heatmaps and the traffic-light table from a previous
/// back-test run in the same output directory.
pub fn cmd_report(cfg: &RunConfig) -> Result<CommandOutcome> {
    ensure_out(cfg)?;
    let summary_path = cfg.out_dir.join("backtest_summary.json");
    if !summary_path.exists() {
        return Err(Error::MissingInput(format!(
            "{} not found; run the backtest command first",
            summary_path.display()
        )));
    }
    let results: Vec<BacktestResult> =
        serde_json::from_reader(std::fs::File::open(&summary_path)?)?;
    let mut outcome = CommandOutcome::default();

    let traffic_path = cfg.out_dir.join("traffic_summary.csv");
    write_traffic_csv(&results, &traffic_path)?;
    outcome.add(traffic_path);

    for result in &results {
        let matrix = heatmap_matrix(&result.importance);
        let stem = format!("heatmap_{}_{}", result.origin, result.destination);
        let csv_path = cfg.out_dir.join(format!("{stem}.csv"));
        let mask_path = cfg.out_dir.join(format!("{stem}_mask.csv"));
        write_heatmap_csv(&matrix, &csv_path, &mask_path)?;
        outcome.add(csv_path);
        outcome.add(mask_path);
        if matrix.columns.is_empty() {
            outcome.diagnostics.push(format!(
                "{}->{}: no variables were ever selected; heatmap is empty",
                result.origin, result.destination
            ));
        }
        if cfg.emit_svg {
            let svg = heatmap_chart(
                &format!("{} to {}: variable importance", result.origin, result.destination),
                &matrix,
            );
            let svg_path = cfg.out_dir.join(format!("{stem}.svg"));
            std::fs::write(&svg_path, svg)?;
            outcome.add(svg_path);
        }
    }
    Ok(outcome)
}

/// Generates a planted-truth bundle on disk together with its ground truth
/// and a ready-to-run config pointing at the files.
pub fn cmd_synth(scfg: &SynthBundleConfig) -> Result<CommandOutcome> {
    std::fs::create_dir_all(&scfg.out_dir)?;
    let (bundle, truths) = synth_bundle(scfg)?;
    let paths = write_bundle(&bundle, &scfg.out_dir)?;
    let mut outcome = CommandOutcome::default();
    for p in [
        &paths.applications,
        &paths.decisions,
        &paths.ibc,
        &paths.events,
        &paths.trends,
    ]
    .into_iter()
    .flatten()
    {
        outcome.add(p.clone());
    }
    let truth_path = scfg.out_dir.join("ground_truth.json");
    write_json(&truths, &truth_path)?;
    outcome.add(truth_path.clone());

    let conf_path = scfg.out_dir.join("flowcast.conf");
    let rel = |p: &Option<PathBuf>| {
        p.as_ref()
            .and_then(|p| p.file_name())
            .map(|f| scfg.out_dir.join(f).display().to_string())
            .unwrap_or_default()
    };
    std::fs::write(
        &conf_path,
        format!(
            "# generated synthetic run\n\
             seed = {}\n\
             data.applications = {}\n\
             data.decisions = {}\n\
             data.ibc = {}\n\
             data.events = {}\n\
             data.trends = {}\n\
             out.dir = {}\n",
            scfg.seed,
            rel(&paths.applications),
            rel(&paths.decisions),
            rel(&paths.ibc),
            rel(&paths.events),
            rel(&paths.trends),
            scfg.out_dir.display(),
        ),
    )?;
    outcome.add(conf_path);
    Ok(outcome)
}

/// Reads files back as a map for byte-comparison in determinism tests.
pub fn read_dir_bytes(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>> {
    let mut map = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        if entry.file_type()?.is_file() {
            map.insert(
                entry.file_name().to_string_lossy().to_string(),
                std::fs::read(entry.path())?,
            );
        }
    }
    Ok(map)
}
