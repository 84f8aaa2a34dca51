//! Per-origin early-warning analysis: panel filtering, change-point tests,
//! momentum signals, lead-lag estimation, lagged correlations, and the
//! L0-L3 alert summary.

mod alert;
mod changepoint;
mod config;
mod correlation;
mod filter;
mod hayashi_yoshida;
mod leadlag;
mod momentum;

pub use alert::{alert_summary, AlertLevel, EarlyWarningReport, SeriesSignals, Trend};
pub use changepoint::{
    changepoint_mean, changepoint_variance, kolmogorov_tail, ChangePointKind, ChangePointResult,
};
pub use config::EarlyWarningConfig;
pub use correlation::{lagged_correlation_matrix, CorrelationRow};
pub use filter::{filter_panel, DropReason, DropRecord, FilterOutcome, SeriesClass};
pub use hayashi_yoshida::{hy_covariance, hy_covariance_brute_force};
pub use leadlag::{
    lead_lag, lead_lag_ratio, lead_lag_scan, llr_rule, LagEstimate, LagScanEntry, LeadLagScan,
    LlrOutcome,
};
pub use momentum::momentum_signal;
