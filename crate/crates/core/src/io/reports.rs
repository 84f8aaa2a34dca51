//! Report emission: CSV tables and JSON documents for every command. All
//! writers are deterministic (sorted keys, stable float formatting) so
//! identical runs produce byte-identical files.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::backtest::{week_errors, BacktestResult, TrafficClass};
use crate::earlywarn::EarlyWarningReport;
use crate::error::Result;
use crate::forecast::DyadForecast;
use crate::ranking::HeatmapMatrix;

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.4}")).unwrap_or_default()
}

/// Early-warning CSV: one row per origin with the summary columns and one
/// alert-level column per monitored series (union across origins, "--"
/// where a series was dropped or absent).
pub fn write_earlywarn_csv(reports: &[EarlyWarningReport], path: &Path) -> Result<()> {
    let mut series_ids: BTreeSet<String> = BTreeSet::new();
    for r in reports {
        for s in &r.series {
            series_ids.insert(s.id.clone());
        }
    }
    let mut f = std::fs::File::create(path)?;
    write!(
        f,
        "origin,as_of,applicants_last_month,total_alerts,alerts_last_week,trend"
    )?;
    for id in &series_ids {
        write!(f, ",{id}")?;
    }
    writeln!(f)?;
    for r in reports {
        write!(
            f,
            "{},{},{},{},{},{}",
            r.origin,
            r.as_of,
            fmt_opt(r.applicants_last_month),
            r.total_alerts,
            r.alerts_last_week,
            r.trend
        )?;
        for id in &series_ids {
            match r.series.iter().find(|s| &s.id == id) {
                Some(s) => write!(f, ",{}", s.alert_level)?,
                None => write!(f, ",--")?,
            }
        }
        writeln!(f)?;
    }
    Ok(())
}

/// One forecast table row per dyad and horizon; filtered or failed dyads
/// appear once with an empty horizon and the status.
#[derive(Debug, Clone, Serialize)]
pub struct ForecastRow {
    pub origin: String,
    pub destination: String,
    pub as_of: String,
    pub horizon: Option<usize>,
    pub forecast: Option<f64>,
    pub benchmark: Option<f64>,
    pub chosen_lambda: Option<f64>,
    pub active_set: String,
    pub status: String,
}

pub fn forecast_rows(outcome: &[(String, String, Result<DyadForecast>)]) -> Vec<ForecastRow> {
    let mut rows = Vec::new();
    for (origin, dest, result) in outcome {
        match result {
            Ok(fc) => {
                let active = fc.model.active_set().join(";");
                for (h, (model, bench)) in
                    fc.forecasts.iter().zip(&fc.benchmark).enumerate()
                {
                    rows.push(ForecastRow {
                        origin: origin.clone(),
                        destination: dest.clone(),
                        as_of: fc.as_of.to_string(),
                        horizon: Some(h + 1),
                        forecast: Some(*model),
                        benchmark: Some(*bench),
                        chosen_lambda: Some(fc.chosen_lambda),
                        active_set: active.clone(),
                        status: "ok".to_string(),
                    });
                }
            }
            Err(err) => rows.push(ForecastRow {
                origin: origin.clone(),
                destination: dest.clone(),
                as_of: String::new(),
                horizon: None,
                forecast: None,
                benchmark: None,
                chosen_lambda: None,
                active_set: String::new(),
                status: match err {
                    crate::error::Error::DyadFiltered(_) => "filtered".to_string(),
                    other => format!("error: {other}"),
                },
            }),
        }
    }
    rows
}

pub fn write_forecast_csv(rows: &[ForecastRow], path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(
        f,
        "origin,destination,as_of,horizon,forecast,benchmark,chosen_lambda,active_set,status"
    )?;
    for r in rows {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{}",
            r.origin,
            r.destination,
            r.as_of,
            r.horizon.map(|h| h.to_string()).unwrap_or_default(),
            fmt_opt(r.forecast),
            fmt_opt(r.benchmark),
            fmt_opt(r.chosen_lambda),
            r.active_set,
            r.status
        )?;
    }
    Ok(())
}

/// Per-week back-test CSV: as_of, forecast, benchmark, actual, rel_err,
/// abs_err (4-week totals; relative error in percent, absolute error in
/// units).
pub fn write_backtest_csv(result: &BacktestResult, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "as_of,forecast,benchmark,actual,rel_err,abs_err")?;
    for row in &result.rows {
        let (rel, abs) = match (row.forecast_total, row.actual_total) {
            (Some(fc), Some(actual)) => {
                let (rel, abs) = week_errors(fc, actual);
                (rel, Some(abs))
            }
            _ => (None, None),
        };
        writeln!(
            f,
            "{},{},{},{},{},{}",
            row.as_of,
            fmt_opt(row.forecast_total),
            fmt_opt(row.benchmark_total),
            fmt_opt(row.actual_total),
            fmt_opt(rel),
            fmt_opt(abs)
        )?;
    }
    Ok(())
}

pub fn write_heatmap_csv(matrix: &HeatmapMatrix, path: &Path, mask_path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    write!(f, "week")?;
    for c in &matrix.columns {
        write!(f, ",{c}")?;
    }
    writeln!(f)?;
    for (r, week) in matrix.weeks.iter().enumerate() {
        write!(f, "{week}")?;
        for c in 0..matrix.columns.len() {
            write!(f, ",{:.4}", matrix.scores[r][c])?;
        }
        writeln!(f)?;
    }
    let mut f = std::fs::File::create(mask_path)?;
    write!(f, "week")?;
    for c in &matrix.columns {
        write!(f, ",{c}")?;
    }
    writeln!(f)?;
    for (r, week) in matrix.weeks.iter().enumerate() {
        write!(f, "{week}")?;
        for c in 0..matrix.columns.len() {
            write!(f, ",{}", u8::from(matrix.included[r][c]))?;
        }
        writeln!(f)?;
    }
    Ok(())
}

/// Traffic-light summary across dyads, one row per dyad with model and
/// benchmark errors, their classes, and whether the benchmark won.
pub fn write_traffic_csv(results: &[BacktestResult], path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(
        f,
        "origin,destination,weeks,model_rel,model_abs,model_class,bench_rel,bench_abs,bench_class,arima_better"
    )?;
    for r in results {
        let (m, b) = (&r.model_stats, &r.benchmark_stats);
        let class = |c: &Option<TrafficClass>| {
            c.map(|c| c.to_string()).unwrap_or_else(|| "--".to_string())
        };
        let arima_better = match (m, b) {
            (Some(m), Some(b)) => {
                if b.mean_rel_pct.abs() < m.mean_rel_pct.abs() {
                    "yes"
                } else {
                    "no"
                }
            }
            _ => "--",
        };
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{},{}",
            r.origin,
            r.destination,
            m.as_ref().map(|s| s.n_weeks).unwrap_or(0),
            fmt_opt(m.as_ref().map(|s| s.mean_rel_pct)),
            fmt_opt(m.as_ref().map(|s| s.mean_abs)),
            class(&r.model_class),
            fmt_opt(b.as_ref().map(|s| s.mean_rel_pct)),
            fmt_opt(b.as_ref().map(|s| s.mean_abs)),
            class(&r.benchmark_class),
            arima_better
        )?;
    }
    Ok(())
}

/// Collects the paths a command produced, for logging and tests.
#[derive(Debug, Default)]
pub struct CommandOutcome {
    pub files: Vec<PathBuf>,
    pub diagnostics: Vec<String>,
}

impl CommandOutcome {
    pub fn add(&mut self, path: PathBuf) {
        self.files.push(path);
    }
}
