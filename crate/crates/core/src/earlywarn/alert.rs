//! Per-origin signal assembly: momentum, change points, and lead-lag results
//! summarized into L0-L3 alert levels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::earlywarn::changepoint::{changepoint_mean, changepoint_variance, ChangePointResult};
use crate::earlywarn::config::EarlyWarningConfig;
use crate::earlywarn::correlation::{lagged_correlation_matrix, CorrelationRow};
use crate::earlywarn::filter::{filter_panel, DropRecord};
use crate::earlywarn::leadlag::{lead_lag_scan, LagEstimate};
use crate::earlywarn::momentum::momentum_signal;
use crate::error::Result;
use crate::timeseries::{months_to_weeks, stats, Panel, WeekIndex, WeeklySeries};

/// Number of signal classes fired for a series, capped at three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlertLevel {
    L0,
    L1,
    L2,
    L3,
}

impl AlertLevel {
    pub fn from_count(count: usize) -> AlertLevel {
        match count {
            0 => AlertLevel::L0,
            1 => AlertLevel::L1,
            2 => AlertLevel::L2,
            _ => AlertLevel::L3,
        }
    }
}

impl fmt::Display for AlertLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlertLevel::L0 => "L0",
            AlertLevel::L1 => "L1",
            AlertLevel::L2 => "L2",
            AlertLevel::L3 => "L3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trend {
    Positive,
    Negative,
    Flat,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Positive => "positive",
            Trend::Negative => "negative",
            Trend::Flat => "flat",
        })
    }
}

/// Signals observed for one retained series within the alert window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesSignals {
    pub id: String,
    /// Momentum firings (week, MA ratio) inside the alert window.
    pub fired_momentum: Vec<(WeekIndex, f64)>,
    pub mean_cp: Option<ChangePointResult>,
    pub var_cp: Option<ChangePointResult>,
    pub alert_level: AlertLevel,
}

/// Early-warning summary for one origin country at one as-of week.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EarlyWarningReport {
    pub origin: String,
    pub as_of: WeekIndex,
    pub target_id: String,
    pub target_retained: bool,
    pub series: Vec<SeriesSignals>,
    /// Significant lead-lag effects between target and covariates.
    pub lag_matrix: Vec<LagEstimate>,
    /// Estimated lead per covariate (significant or not), for the
    /// correlation table and downstream lagged design columns.
    pub all_lags: Vec<LagEstimate>,
    pub lagged_correlations: Vec<CorrelationRow>,
    pub drops: Vec<DropRecord>,
    pub applicants_last_month: Option<f64>,
    pub total_alerts: usize,
    pub alerts_last_week: usize,
    pub trend: Trend,
}

impl EarlyWarningReport {
    /// Significant positive leads (covariate leads the target), the inputs
    /// for lagged design columns.
    pub fn significant_leads(&self) -> impl Iterator<Item = (&str, i64)> {
        self.lag_matrix.iter().filter_map(|e| {
            if e.theta_hat > 0 && e.lagger == self.target_id {
                Some((e.leader.as_str(), e.theta_hat))
            } else {
                None
            }
        })
    }
}

fn signals_for(s: &WeeklySeries, cfg: &EarlyWarningConfig) -> SeriesSignals {
    let alert_weeks = months_to_weeks(cfg.alert_w);
    let window_start = s.end().plus_weeks(-(alert_weeks as i64 - 1));
    let fired_momentum: Vec<(WeekIndex, f64)> = momentum_signal(s, cfg)
        .map(|f| f.into_iter().filter(|(w, _)| *w >= window_start).collect())
        .unwrap_or_default();
    let mean_cp = changepoint_mean(s, alert_weeks, cfg.pvalue).ok();
    let var_cp = changepoint_variance(s, alert_weeks, cfg.pvalue).ok();
    let count = usize::from(!fired_momentum.is_empty())
        + usize::from(mean_cp.as_ref().is_some_and(|r| r.significant()))
        + usize::from(var_cp.as_ref().is_some_and(|r| r.significant()));
    SeriesSignals {
        id: s.id.clone(),
        fired_momentum,
        mean_cp,
        var_cp,
        alert_level: AlertLevel::from_count(count),
    }
}

/// Runs the whole early-warning analysis for one origin: filtering, per-
/// series signals, lead-lag against the target, correlations, and the
/// origin-level totals.
pub fn alert_summary(
    panel: &Panel,
    cfg: &EarlyWarningConfig,
    origin: &str,
    seed: u64,
) -> Result<EarlyWarningReport> {
    let filtered = filter_panel(panel, cfg)?;
    let panel = &filtered.panel;
    let target = panel.target();
    let as_of = panel.end();

    let series: Vec<SeriesSignals> = panel.series().iter().map(|s| signals_for(s, cfg)).collect();

    let mut lag_matrix = Vec::new();
    let mut all_lags = Vec::new();
    if filtered.target_retained {
        for cov in panel.covariates() {
            if let Ok(scan) = lead_lag_scan(cov, target, cfg, seed) {
                if scan.estimate.p_value < cfg.llag_thr {
                    lag_matrix.push(scan.estimate.clone());
                }
                all_lags.push(scan.estimate);
            }
        }
    }
    let corr_inputs: Vec<(String, i64)> = all_lags
        .iter()
        .map(|e| {
            let cov = if e.leader == target.id { &e.lagger } else { &e.leader };
            (cov.clone(), e.theta_hat)
        })
        .collect();
    let lagged_correlations = lagged_correlation_matrix(panel, &corr_inputs);

    let applicants_last_month = {
        let tail = target.tail(4);
        let xs = stats::present(tail.values());
        if xs.is_empty() {
            None
        } else {
            Some(xs.iter().sum())
        }
    };
    let total_alerts: usize = series
        .iter()
        .map(|s| {
            s.fired_momentum.len()
                + usize::from(s.mean_cp.as_ref().is_some_and(|r| r.significant()))
                + usize::from(s.var_cp.as_ref().is_some_and(|r| r.significant()))
        })
        .sum();
    let alerts_last_week: usize = series
        .iter()
        .map(|s| {
            s.fired_momentum.iter().filter(|(w, _)| *w == as_of).count()
                + usize::from(
                    s.mean_cp
                        .as_ref()
                        .is_some_and(|r| r.location == Some(as_of)),
                )
                + usize::from(
                    s.var_cp
                        .as_ref()
                        .is_some_and(|r| r.location == Some(as_of)),
                )
        })
        .sum();
    let trend = match stats::ols_slope(target.tail(12).values()) {
        Some(slope) if slope > 1e-9 => Trend::Positive,
        Some(slope) if slope < -1e-9 => Trend::Negative,
        _ => Trend::Flat,
    };

    Ok(EarlyWarningReport {
        origin: origin.to_string(),
        as_of,
        target_id: target.id.clone(),
        target_retained: filtered.target_retained,
        series,
        lag_matrix,
        all_lags,
        lagged_correlations,
        drops: filtered.drops,
        applicants_last_month,
        total_alerts,
        alerts_last_week,
        trend,
    })
}
