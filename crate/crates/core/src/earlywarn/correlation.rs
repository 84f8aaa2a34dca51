//! Pearson correlations between the target and each covariate, with and
//! without shifting the covariate by its estimated lead.

use serde::{Deserialize, Serialize};

use crate::timeseries::{stats, Panel};

/// Correlation entry for one covariate. `shifted` pairs the covariate value
/// from `theta` weeks earlier with the current target value, so a covariate
/// that leads the target shows its predictive correlation there.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub series: String,
    pub theta: i64,
    pub unshifted: Option<f64>,
    pub shifted: Option<f64>,
}

const MIN_PAIRS: usize = 3;

/// Correlations between the panel target and each covariate listed in
/// `lags` (covariate id -> estimated lead in weeks). Entries with fewer than
/// three overlapping observations are missing.
pub fn lagged_correlation_matrix(
    panel: &Panel,
    lags: &[(String, i64)],
) -> Vec<CorrelationRow> {
    let target = panel.target();
    lags.iter()
        .filter_map(|(id, theta)| {
            let cov = panel.get(id)?;
            let unshifted = stats::pearson(cov.values(), target.values(), MIN_PAIRS);
            // Move the covariate forward in time by theta so cov_{t-theta}
            // lines up with target_t.
            let moved = cov
                .shift_weeks(*theta)
                .reindex(target.start(), target.end())
                .ok()?;
            let shifted = stats::pearson(moved.values(), target.values(), MIN_PAIRS);
            Some(CorrelationRow {
                series: id.clone(),
                theta: *theta,
                unshifted,
                shifted,
            })
        })
        .collect()
}
