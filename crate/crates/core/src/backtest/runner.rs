//! Week-by-week simulated forecasting with strict no-lookahead: at each
//! as-of week every input is truncated to what was observable then, the
//! early-warning stage reruns, and the dyad is re-fitted.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::backtest::stats::{error_stats, ErrorStats};
use crate::backtest::traffic::{traffic_light, TrafficClass};
use crate::earlywarn::{alert_summary, filter_panel, EarlyWarningConfig, EarlyWarningReport};
use crate::error::{Error, Result};
use crate::forecast::{
    build_design, forecast_applications, window_design, DesignMatrix, DyadForecast, ForecastConfig,
};
use crate::ranking::{relative_rank, rf_importance, ForestParams, ImportanceRow};
use crate::rng::derive_seed;
use crate::timeseries::{months_to_weeks, Panel, WeekIndex};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BacktestConfig {
    /// First as-of week of the simulation (the week containing this date).
    pub start_date: NaiveDate,
    /// Last as-of week; `None` runs to the end of the data.
    pub final_date: Option<NaiveDate>,
    /// Minimum weeks of history required before the first as-of week.
    pub training_floor: usize,
    pub seed: u64,
    pub ew: EarlyWarningConfig,
    pub fc: ForecastConfig,
    /// Rank active variables with the random forest each week.
    pub rank_variables: bool,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        BacktestConfig {
            start_date: NaiveDate::from_ymd_opt(2017, 1, 1).expect("valid date"),
            final_date: None,
            training_floor: 50,
            seed: 42,
            ew: EarlyWarningConfig::default(),
            fc: ForecastConfig::default(),
            rank_variables: true,
        }
    }
}

/// One simulated as-of week. Totals are sums over the n_ahead horizon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BacktestRow {
    pub as_of: WeekIndex,
    pub forecast_total: Option<f64>,
    pub benchmark_total: Option<f64>,
    /// Sum of the actuals over the horizon, when every week is observed.
    pub actual_total: Option<f64>,
    /// Per-horizon point forecasts (empty when the week errored).
    pub forecasts: Vec<f64>,
    pub benchmarks: Vec<f64>,
    pub chosen_lambda: Option<f64>,
    pub lambda_fallback: bool,
    pub benchmark_fallback: bool,
    pub active_set: Vec<String>,
    /// "ok" or the error that stopped this week.
    pub status: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BacktestResult {
    pub origin: String,
    pub destination: String,
    pub rows: Vec<BacktestRow>,
    pub model_stats: Option<ErrorStats>,
    pub benchmark_stats: Option<ErrorStats>,
    pub model_class: Option<TrafficClass>,
    pub benchmark_class: Option<TrafficClass>,
    /// Per-week relative ranks of the selected variables.
    pub importance: Vec<ImportanceRow>,
}

/// Signature of the per-dyad forecaster the runner drives. Tests inject
/// oracles here; production uses [`forecast_applications`].
pub type DyadForecaster<'a> =
    &'a dyn Fn(&Panel, &ForecastConfig, &EarlyWarningReport, &str, &str) -> Result<DyadForecast>;

pub fn run_backtest(
    panel: &Panel,
    cfg: &BacktestConfig,
    origin: &str,
    destination: &str,
) -> Result<BacktestResult> {
    run_backtest_with(panel, cfg, origin, destination, &forecast_applications)
}

/// Restricts a fitted window design to the model's active columns.
fn active_design(design: &DesignMatrix, active: &[String]) -> DesignMatrix {
    let keep: Vec<usize> = design
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| active.contains(c))
        .map(|(j, _)| j)
        .collect();
    DesignMatrix {
        weeks: design.weeks.clone(),
        columns: keep.iter().map(|j| design.columns[*j].clone()).collect(),
        x: keep.iter().map(|j| design.x[*j].clone()).collect(),
        y: design.y.clone(),
    }
}

pub fn run_backtest_with(
    panel: &Panel,
    cfg: &BacktestConfig,
    origin: &str,
    destination: &str,
    forecaster: DyadForecaster,
) -> Result<BacktestResult> {
    let first = WeekIndex::from_date(cfg.start_date);
    // As-of weeks need an observed target; covariate tiers may extend the
    // aligned panel further, but nothing can be forecast from there.
    let last_target = panel
        .last_target_week()
        .ok_or_else(|| Error::InsufficientData("target has no observations".into()))?;
    let last = cfg
        .final_date
        .map(WeekIndex::from_date)
        .unwrap_or(last_target)
        .min(last_target);
    if last < first {
        return Err(Error::EmptyRange);
    }
    let history = panel.start().weeks_until(first);
    if history < cfg.training_floor as i64 {
        return Err(Error::InsufficientHistory(format!(
            "{history} weeks before the start date, need >= {}",
            cfg.training_floor
        )));
    }

    let horizon = cfg.fc.n_ahead;
    let mut rows = Vec::new();
    let mut importance = Vec::new();
    let mut eval_pairs_model: Vec<(f64, f64)> = Vec::new();
    let mut eval_pairs_bench: Vec<(f64, f64)> = Vec::new();

    for as_of in first.range_through(last) {
        let week_seed = derive_seed(cfg.seed, &[origin, destination, &as_of.to_string()]);
        let row = simulate_week(panel, cfg, origin, destination, as_of, week_seed, forecaster);
        match row {
            Ok((mut row, imp)) => {
                row.actual_total = actual_total(panel, as_of, horizon);
                if let (Some(f), Some(b), Some(a)) =
                    (row.forecast_total, row.benchmark_total, row.actual_total)
                {
                    eval_pairs_model.push((f, a));
                    eval_pairs_bench.push((b, a));
                }
                rows.push(row);
                if let Some(imp) = imp {
                    importance.push(imp);
                }
            }
            Err(err) => rows.push(BacktestRow {
                as_of,
                forecast_total: None,
                benchmark_total: None,
                actual_total: actual_total(panel, as_of, horizon),
                forecasts: Vec::new(),
                benchmarks: Vec::new(),
                chosen_lambda: None,
                lambda_fallback: false,
                benchmark_fallback: false,
                active_set: Vec::new(),
                status: err.to_string(),
            }),
        }
    }
    let model_stats = error_stats(&eval_pairs_model);
    let benchmark_stats = error_stats(&eval_pairs_bench);
    let model_class = model_stats
        .as_ref()
        .map(|s| traffic_light(s.mean_rel_pct, s.mean_abs));
    let benchmark_class = benchmark_stats
        .as_ref()
        .map(|s| traffic_light(s.mean_rel_pct, s.mean_abs));
    Ok(BacktestResult {
        origin: origin.to_string(),
        destination: destination.to_string(),
        rows,
        model_stats,
        benchmark_stats,
        model_class,
        benchmark_class,
        importance,
    })
}

fn actual_total(panel: &Panel, as_of: WeekIndex, horizon: usize) -> Option<f64> {
    let target = panel.target();
    let mut total = 0.0;
    for h in 1..=horizon as i64 {
        total += target.get(as_of.plus_weeks(h))?;
    }
    Some(total)
}

#[allow(clippy::too_many_arguments)]
fn simulate_week(
    panel: &Panel,
    cfg: &BacktestConfig,
    origin: &str,
    destination: &str,
    as_of: WeekIndex,
    week_seed: u64,
    forecaster: DyadForecaster,
) -> Result<(BacktestRow, Option<ImportanceRow>)> {
    // Strict no-lookahead: truncate first, then cap the analysis window.
    let truncated = panel.truncate_at(as_of)?;
    let analysis = truncated.tail(back_window(cfg, &truncated))?;
    let ew = alert_summary(&analysis, &cfg.ew, origin, week_seed)?;
    let filtered = filter_panel(&analysis, &cfg.ew)?;
    let fc = forecaster(&filtered.panel, &cfg.fc, &ew, origin, destination)?;

    let imp = if cfg.rank_variables && !fc.model.columns.is_empty() {
        rank_active_variables(&filtered.panel, &ew, &fc, cfg, week_seed, as_of)
    } else if cfg.rank_variables {
        Some(relative_rank(as_of, &[]))
    } else {
        None
    };

    Ok((
        BacktestRow {
            as_of,
            forecast_total: Some(fc.forecasts.iter().sum()),
            benchmark_total: Some(fc.benchmark.iter().sum()),
            actual_total: None,
            forecasts: fc.forecasts.clone(),
            benchmarks: fc.benchmark.clone(),
            chosen_lambda: Some(fc.chosen_lambda),
            lambda_fallback: fc.lambda_fallback,
            benchmark_fallback: fc.benchmark_fallback,
            active_set: fc.active_set(),
            status: "ok".to_string(),
        },
        imp,
    ))
}

fn back_window(cfg: &BacktestConfig, truncated: &Panel) -> usize {
    months_to_weeks(cfg.ew.back_w).min(truncated.n_weeks())
}

fn rank_active_variables(
    filtered: &Panel,
    ew: &EarlyWarningReport,
    fc: &DyadForecast,
    cfg: &BacktestConfig,
    week_seed: u64,
    as_of: WeekIndex,
) -> Option<ImportanceRow> {
    let active = fc.active_set();
    if active.is_empty() {
        return Some(relative_rank(as_of, &[]));
    }
    let leads: Vec<(String, i64)> = ew
        .significant_leads()
        .map(|(id, lag)| (id.to_string(), lag))
        .collect();
    let base = build_design(filtered, &leads);
    let start = base.n_weeks().saturating_sub(cfg.fc.prediction_win);
    let design = window_design(&base, start, cfg.fc.prediction_win, 10).ok()?;
    let restricted = active_design(&design, &active);
    if restricted.columns.is_empty() {
        return Some(relative_rank(as_of, &[]));
    }
    let raw = rf_importance(
        &restricted,
        derive_seed(week_seed, &["rf"]),
        ForestParams::default(),
    )
    .ok()?;
    let pairs: Vec<(String, f64)> = restricted
        .columns
        .iter()
        .cloned()
        .zip(raw)
        .collect();
    Some(relative_rank(as_of, &pairs))
}

impl DyadForecast {
    pub fn active_set(&self) -> Vec<String> {
        self.model.active_set().iter().map(|s| s.to_string()).collect()
    }
}
