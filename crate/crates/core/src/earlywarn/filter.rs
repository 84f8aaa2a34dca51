//! Statistical cleaning of a panel before any signal detection: series with
//! no usable information are dropped, with a reason recorded per drop.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::earlywarn::config::EarlyWarningConfig;
use crate::error::Result;
use crate::timeseries::{coefficient_of_variation, months_to_weeks, Panel, WeeklySeries};

/// Series classes that carry a minimum-activity threshold. Classification is
/// by id prefix, the naming convention the ingestion layer guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesClass {
    Applicant,
    Ibc,
    Pending,
    Decision,
}

impl SeriesClass {
    pub fn of(id: &str) -> Option<SeriesClass> {
        if id.starts_with("applicant.") {
            Some(SeriesClass::Applicant)
        } else if id.starts_with("ibc.") {
            Some(SeriesClass::Ibc)
        } else if id.starts_with("pending.") {
            Some(SeriesClass::Pending)
        } else if id.starts_with("decision.") {
            Some(SeriesClass::Decision)
        } else {
            None
        }
    }

    fn threshold(self, cfg: &EarlyWarningConfig) -> f64 {
        match self {
            SeriesClass::Applicant => cfg.applicant_thr,
            SeriesClass::Ibc => cfg.ibc_thr,
            SeriesClass::Pending => cfg.pending_thr,
            SeriesClass::Decision => cfg.decision_thr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DropReason {
    /// Too many missing values.
    Na,
    /// Coefficient of variation below the threshold (or undefined with no
    /// variability).
    Cv,
    /// Trailing-window maximum below the class threshold.
    BelowThreshold(SeriesClass),
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DropReason::Na => f.write_str("na"),
            DropReason::Cv => f.write_str("cv"),
            DropReason::BelowThreshold(SeriesClass::Applicant) => f.write_str("applicant_thr"),
            DropReason::BelowThreshold(SeriesClass::Ibc) => f.write_str("ibc_thr"),
            DropReason::BelowThreshold(SeriesClass::Pending) => f.write_str("pending_thr"),
            DropReason::BelowThreshold(SeriesClass::Decision) => f.write_str("decision_thr"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DropRecord {
    pub id: String,
    pub reason: DropReason,
}

/// Result of filtering. The target stays in the panel whatever happens; when
/// it fails a rule itself, `target_retained` is false and the dyad counts as
/// unanalyzable downstream.
#[derive(Debug, Clone)]
pub struct FilterOutcome {
    pub panel: Panel,
    pub drops: Vec<DropRecord>,
    pub target_retained: bool,
}

fn failure_reason(s: &WeeklySeries, cfg: &EarlyWarningConfig) -> Option<DropReason> {
    if s.missing_fraction() > cfg.na_thr {
        return Some(DropReason::Na);
    }
    if let Some(class) = SeriesClass::of(&s.id) {
        // Activity rules look only at the trailing cleaning window.
        let window = s.tail(months_to_weeks(cfg.clean_w));
        let max = window
            .values()
            .iter()
            .filter_map(|v| *v)
            .fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() || max < class.threshold(cfg) {
            return Some(DropReason::BelowThreshold(class));
        }
    }
    match coefficient_of_variation(s) {
        Ok(cv) if cv < cfg.cv_thr => Some(DropReason::Cv),
        Ok(_) => None,
        // Mean exactly zero with spread: variability is present, the cv rule
        // just cannot price it; keep the series.
        Err(crate::error::Error::UndefinedCv) => None,
        // Fewer than two observations carry no statistical information.
        Err(_) => Some(DropReason::Cv),
    }
}

/// Applies the drop rules to every series. Covariates failing any rule are
/// removed; the target always stays but is flagged when it fails.
pub fn filter_panel(panel: &Panel, cfg: &EarlyWarningConfig) -> Result<FilterOutcome> {
    let mut drops = Vec::new();
    let mut retained = Vec::new();
    let mut target_retained = true;
    for s in panel.series() {
        let reason = failure_reason(s, cfg);
        let is_target = s.id == panel.target_id();
        match reason {
            Some(reason) => {
                drops.push(DropRecord {
                    id: s.id.clone(),
                    reason,
                });
                if is_target {
                    target_retained = false;
                    retained.push(s.clone());
                }
            }
            None => retained.push(s.clone()),
        }
    }
    Ok(FilterOutcome {
        panel: panel.with_series(retained)?,
        drops,
        target_retained,
    })
}
