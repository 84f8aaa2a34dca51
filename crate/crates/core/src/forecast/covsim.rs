//! Future covariate paths for the active regressors.
//!
//! Lagged columns whose lead covers the whole horizon read observed values
//! directly. Everything else is simulated: a joint VAR(1) on the trailing
//! prediction window; per-series ARMA(1,1) when the VAR is unusable or
//! unstable; the trailing mean when that fails too. The chain always
//! terminates.

use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::forecast::arma::fit_arma11;
use crate::forecast::config::ForecastConfig;
use crate::forecast::design::parse_lagged;
use crate::forecast::var::fit_var1;
use crate::timeseries::{stats, Panel};

/// How a simulated series ended up being modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimMethod {
    Observed,
    Var,
    Arma,
    Mean,
}

/// Simulated (or looked-up) future values for one design column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovariatePath {
    pub column: String,
    pub values: Vec<f64>,
    pub method: SimMethod,
}

fn trailing_mean(panel: &Panel, id: &str, window: usize) -> f64 {
    let Some(series) = panel.get(id) else { return 0.0 };
    let tail = stats::present(series.tail(window).values());
    if !tail.is_empty() {
        return stats::mean(&tail);
    }
    let all = stats::present(series.values());
    if all.is_empty() {
        0.0
    } else {
        stats::mean(&all)
    }
}

/// Simulates horizons 1..=n_ahead for every column in `active`.
pub fn forecast_covariates(
    panel: &Panel,
    active: &[String],
    cfg: &ForecastConfig,
) -> Vec<CovariatePath> {
    let horizon = cfg.n_ahead;
    // Underlying series that need model-based simulation: any column whose
    // lag leaves part of the horizon unobserved.
    let mut to_simulate: Vec<String> = Vec::new();
    for name in active {
        let (id, lag) = parse_lagged(name);
        if (lag as usize) < horizon && !to_simulate.iter().any(|s| s == id) {
            to_simulate.push(id.to_string());
        }
    }

    // Joint VAR(1) over the trailing prediction window, complete rows only.
    let mut simulated: BTreeMap<String, (Vec<f64>, SimMethod)> = BTreeMap::new();
    if !to_simulate.is_empty() {
        let tail_len = cfg.prediction_win.min(panel.n_weeks());
        let offset = panel.n_weeks() - tail_len;
        let rows: Vec<Vec<f64>> = (offset..panel.n_weeks())
            .filter_map(|i| {
                to_simulate
                    .iter()
                    .map(|id| panel.get(id).and_then(|s| s.value_at(i)))
                    .collect::<Option<Vec<f64>>>()
            })
            .collect();
        let var_paths = fit_var1(&rows).filter(|f| f.is_stable()).map(|fit| {
            let last = DVector::from_iterator(
                to_simulate.len(),
                rows.last().expect("fit implies rows").iter().copied(),
            );
            fit.forecast(&last, horizon)
        });
        if let Some(steps) = var_paths {
            for (k, id) in to_simulate.iter().enumerate() {
                let path: Vec<f64> = steps.iter().map(|s| s[k]).collect();
                if path.iter().all(|v| v.is_finite()) {
                    simulated.insert(id.clone(), (path, SimMethod::Var));
                }
            }
        }
        // ARMA(1,1) fallback per remaining series, then the mean.
        for id in &to_simulate {
            if simulated.contains_key(id) {
                continue;
            }
            let obs: Vec<f64> = panel
                .get(id)
                .map(|s| stats::present(s.tail(cfg.prediction_win).values()))
                .unwrap_or_default();
            let arma_path = fit_arma11(&obs).ok().map(|fit| fit.forecast(horizon));
            match arma_path {
                Some(path) if path.iter().all(|v| v.is_finite()) => {
                    simulated.insert(id.clone(), (path, SimMethod::Arma));
                }
                _ => {
                    let mean = trailing_mean(panel, id, cfg.prediction_win);
                    simulated.insert(id.clone(), (vec![mean; horizon], SimMethod::Mean));
                }
            }
        }
    }

    active
        .iter()
        .map(|name| {
            let (id, lag) = parse_lagged(name);
            let series = panel.get(id);
            let end = panel.end();
            let mut method = if (lag as usize) >= horizon {
                SimMethod::Observed
            } else {
                simulated.get(id).map(|(_, m)| *m).unwrap_or(SimMethod::Mean)
            };
            let values: Vec<f64> = (1..=horizon as i64)
                .map(|h| {
                    // Column value at week end + h is the underlying series
                    // at end + h - lag.
                    if h <= lag {
                        let week = end.plus_weeks(h - lag);
                        match series.and_then(|s| s.get(week)) {
                            Some(v) => v,
                            None => {
                                method = SimMethod::Mean;
                                trailing_mean(panel, id, cfg.prediction_win)
                            }
                        }
                    } else {
                        let step = (h - lag - 1) as usize;
                        match simulated.get(id) {
                            Some((path, _)) => path[step],
                            None => trailing_mean(panel, id, cfg.prediction_win),
                        }
                    }
                })
                .collect();
            CovariatePath {
                column: name.clone(),
                values,
                method,
            }
        })
        .collect()
}
