//! Per-dyad application forecasts: final penalized fit on the trailing
//! window, simulated covariate paths fed through it, and the ARMA(1,1)
//! benchmark fitted on the target alone.

use serde::{Deserialize, Serialize};

use crate::earlywarn::EarlyWarningReport;
use crate::error::{Error, Result};
use crate::forecast::arma::fit_arma11;
use crate::forecast::config::ForecastConfig;
use crate::forecast::covsim::{forecast_covariates, CovariatePath};
use crate::forecast::design::{build_design, window_design};
use crate::forecast::enet::{enet_fit, EnetFit, EnetParams};
use crate::forecast::lambda::{rolling_lambda_select, LambdaSelection};
use crate::timeseries::{stats, Panel, WeekIndex, WeeklySeries};

/// One dyad's forecast bundle at one as-of week.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DyadForecast {
    pub origin: String,
    pub destination: String,
    pub as_of: WeekIndex,
    /// Point forecasts for horizons 1..=n_ahead, clamped at zero.
    pub forecasts: Vec<f64>,
    /// ARMA(1,1) benchmark forecasts, clamped at zero.
    pub benchmark: Vec<f64>,
    /// True when the benchmark fell back to the trailing mean.
    pub benchmark_fallback: bool,
    pub chosen_lambda: f64,
    pub lambda_fallback: bool,
    pub model: EnetFit,
    pub covariate_paths: Vec<CovariatePath>,
}

/// ARMA(1,0,1) benchmark on the target history alone. Falls back to a flat
/// trailing-mean forecast when the optimizer does not converge; the flag
/// reports which happened.
pub fn benchmark_arima(
    target: &WeeklySeries,
    cfg: &ForecastConfig,
) -> Result<(Vec<f64>, bool)> {
    let tail = target.tail(cfg.training_weeks);
    let obs = stats::present(tail.values());
    if obs.len() < 20 {
        return Err(Error::InsufficientData(format!(
            "benchmark on '{}' needs >= 20 trailing observations, got {}",
            target.id,
            obs.len()
        )));
    }
    match fit_arma11(&obs) {
        Ok(fit) => Ok((
            fit.forecast(cfg.n_ahead).iter().map(|v| v.max(0.0)).collect(),
            false,
        )),
        Err(_) => {
            let mean = stats::mean(&obs).max(0.0);
            Ok((vec![mean; cfg.n_ahead], true))
        }
    }
}

/// Full per-dyad forecast: penalty selection on rolling windows, final fit
/// on the trailing prediction window, covariate simulation, prediction, and
/// the benchmark. `panel` must already be filtered; `ew` carries the
/// significant leads that become lagged design columns.
pub fn forecast_applications(
    panel: &Panel,
    cfg: &ForecastConfig,
    ew: &EarlyWarningReport,
    origin: &str,
    destination: &str,
) -> Result<DyadForecast> {
    if !ew.target_retained {
        return Err(Error::DyadFiltered(format!(
            "target '{}' failed the filter rules",
            panel.target_id()
        )));
    }
    let leads: Vec<(String, i64)> = ew
        .significant_leads()
        .map(|(id, lag)| (id.to_string(), lag))
        .collect();
    let base = build_design(panel, &leads);
    let selection: LambdaSelection = rolling_lambda_select(&base, cfg)?;

    // Final model: trailing prediction window at the chosen penalty.
    let final_start = base.n_weeks().saturating_sub(cfg.prediction_win);
    let design = window_design(&base, final_start, cfg.prediction_win, 4)?;
    let model = if design.n_cols() == 0 || selection.lambda == 0.0 && selection.windows_evaluated == 0
    {
        intercept_only(&design, cfg)
    } else {
        enet_fit(
            &design,
            cfg.alpha,
            selection.lambda,
            None,
            None,
            EnetParams::default(),
        )?
    };

    let active: Vec<String> = model.active_set().iter().map(|s| s.to_string()).collect();
    let covariate_paths = forecast_covariates(panel, &active, cfg);

    let forecasts: Vec<f64> = (0..cfg.n_ahead)
        .map(|h| {
            let mut value = model.intercept;
            for (name, beta) in model.columns.iter().zip(&model.coefficients) {
                if *beta == 0.0 {
                    continue;
                }
                let path = covariate_paths
                    .iter()
                    .find(|p| &p.column == name)
                    .expect("path built for every active column");
                value += beta * path.values[h];
            }
            value.max(0.0)
        })
        .collect();
    if forecasts.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("forecast"));
    }

    let (benchmark, benchmark_fallback) = benchmark_arima(panel.target(), cfg)?;

    Ok(DyadForecast {
        origin: origin.to_string(),
        destination: destination.to_string(),
        as_of: panel.end(),
        forecasts,
        benchmark,
        benchmark_fallback,
        chosen_lambda: selection.lambda,
        lambda_fallback: selection.fallback,
        model,
        covariate_paths,
    })
}

/// Degenerate model when no covariate is usable: intercept = target mean
/// over the window.
fn intercept_only(
    design: &crate::forecast::design::DesignMatrix,
    cfg: &ForecastConfig,
) -> EnetFit {
    EnetFit {
        columns: Vec::new(),
        intercept: if design.y.is_empty() {
            0.0
        } else {
            stats::mean(&design.y)
        },
        coefficients: Vec::new(),
        std_coefficients: Vec::new(),
        column_means: Vec::new(),
        column_sds: Vec::new(),
        lambda: 0.0,
        alpha: cfg.alpha,
        training_mse: if design.y.len() > 1 {
            stats::sample_var(&design.y)
        } else {
            0.0
        },
        objective_path: Vec::new(),
        sweeps: 0,
    }
}
