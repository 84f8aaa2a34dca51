use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the early-warning stage. Defaults follow the shipped
/// parameter table; window lengths ending in `_w` are in months, `ma1`/`ma2`
/// and `delta_max` in weeks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EarlyWarningConfig {
    /// Series with coefficient of variation below this are excluded.
    pub cv_thr: f64,
    /// Minimum trailing max for irregular-border-crossing series.
    pub ibc_thr: f64,
    /// Minimum trailing max for applicant series.
    pub applicant_thr: f64,
    /// Minimum trailing max for pending-case series.
    pub pending_thr: f64,
    /// Minimum trailing max for decision series.
    pub decision_thr: f64,
    /// Series with more than this fraction of missing data are dropped.
    pub na_thr: f64,
    /// Short moving-average length (weeks).
    pub ma1: usize,
    /// Long moving-average length (weeks).
    pub ma2: usize,
    /// Momentum fires when ma1/ma2 leaves [1/ma_thr, ma_thr].
    pub ma_thr: f64,
    /// Cleaning window (months): the max-value drop rules look only at this
    /// trailing span.
    pub clean_w: u32,
    /// Signal window (months) for change points and alert counting.
    pub alert_w: u32,
    /// Total history (months) the analysis looks back over.
    pub back_w: u32,
    /// Significance threshold for the change-point tests.
    pub pvalue: f64,
    /// Significance threshold for lead-lag effects.
    pub llag_thr: f64,
    /// Lead-lag search bound: lags scanned are -delta_max..=delta_max weeks.
    pub delta_max: i64,
    /// Permutations for the lead-lag significance test.
    pub n_permutations: usize,
}

impl Default for EarlyWarningConfig {
    fn default() -> Self {
        EarlyWarningConfig {
            cv_thr: 0.05,
            ibc_thr: 100.0,
            applicant_thr: 100.0,
            pending_thr: 100.0,
            decision_thr: 100.0,
            na_thr: 0.3,
            ma1: 6,
            ma2: 24,
            ma_thr: 1.1,
            clean_w: 6,
            alert_w: 12,
            back_w: 24,
            pvalue: 0.05,
            llag_thr: 0.05,
            delta_max: 8,
            n_permutations: 199,
        }
    }
}

impl EarlyWarningConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("cv.thr", self.cv_thr),
            ("ibc.thr", self.ibc_thr),
            ("applicant.thr", self.applicant_thr),
            ("pending.thr", self.pending_thr),
            ("decision.thr", self.decision_thr),
            ("ma.th", self.ma_thr),
        ];
        for (name, v) in positive {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidConfig(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.ma1 < 1 || self.ma2 < 1 || self.ma1 >= self.ma2 {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= ma1 < ma2, got ma1={} ma2={}",
                self.ma1, self.ma2
            )));
        }
        if !(self.na_thr > 0.0 && self.na_thr < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "na.th must lie in (0, 1), got {}",
                self.na_thr
            )));
        }
        for (name, v) in [("pvalue", self.pvalue), ("llag.th", self.llag_thr)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        if self.delta_max < 1 {
            return Err(Error::InvalidConfig(format!(
                "delta.max must be >= 1, got {}",
                self.delta_max
            )));
        }
        if self.clean_w == 0 || self.alert_w == 0 || self.back_w == 0 {
            return Err(Error::InvalidConfig("window lengths must be > 0".into()));
        }
        Ok(())
    }
}
