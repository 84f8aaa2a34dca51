//! Error statistics over evaluated back-test weeks.
//!
//! Per week: relative error = (forecast - actual) / actual * 100, signed,
//! defined only for actual > 0; absolute error = |forecast - actual|, kept
//! for every week with an actual. Model and benchmark are always evaluated
//! over the identical week set.

use serde::{Deserialize, Serialize};

use crate::timeseries::stats as ts;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorStats {
    pub n_weeks: usize,
    pub n_rel_weeks: usize,
    pub mean_rel_pct: f64,
    /// Mean of |relative error|: the magnitude that model-vs-benchmark
    /// comparisons use (signed means cancel).
    pub mean_abs_rel_pct: f64,
    pub median_rel_pct: f64,
    pub sd_rel_pct: f64,
    pub max_rel_pct: f64,
    pub min_rel_pct: f64,
    pub mean_abs: f64,
    pub median_abs: f64,
    pub sd_abs: f64,
    pub max_abs: f64,
    pub min_abs: f64,
}

/// Relative (percent, signed) and absolute error of one evaluated week.
pub fn week_errors(forecast: f64, actual: f64) -> (Option<f64>, f64) {
    let rel = if actual > 0.0 {
        Some((forecast - actual) / actual * 100.0)
    } else {
        None
    };
    (rel, (forecast - actual).abs())
}

/// Summarizes (forecast, actual) pairs. Returns `None` with no evaluated
/// weeks.
pub fn error_stats(pairs: &[(f64, f64)]) -> Option<ErrorStats> {
    if pairs.is_empty() {
        return None;
    }
    let mut rels = Vec::new();
    let mut abss = Vec::new();
    for (forecast, actual) in pairs {
        let (rel, abs) = week_errors(*forecast, *actual);
        if let Some(rel) = rel {
            rels.push(rel);
        }
        abss.push(abs);
    }
    let dist = |xs: &[f64]| -> (f64, f64, f64, f64, f64) {
        if xs.is_empty() {
            return (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN);
        }
        let mean = ts::mean(xs);
        let median = ts::median(xs);
        let sd = if xs.len() > 1 { ts::sample_sd(xs) } else { 0.0 };
        let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        (mean, median, sd, max, min)
    };
    let (mean_rel_pct, median_rel_pct, sd_rel_pct, max_rel_pct, min_rel_pct) = dist(&rels);
    let mean_abs_rel_pct = if rels.is_empty() {
        f64::NAN
    } else {
        ts::mean(&rels.iter().map(|r| r.abs()).collect::<Vec<_>>())
    };
    let (mean_abs, median_abs, sd_abs, max_abs, min_abs) = dist(&abss);
    Some(ErrorStats {
        n_weeks: pairs.len(),
        n_rel_weeks: rels.len(),
        mean_rel_pct,
        mean_abs_rel_pct,
        median_rel_pct,
        sd_rel_pct,
        max_rel_pct,
        min_rel_pct,
        mean_abs,
        median_abs,
        sd_abs,
        max_abs,
        min_abs,
    })
}
