//! Week-by-week back-testing against the ARMA benchmark: simulated
//! forecasts under strict no-lookahead, error statistics, confidence bands,
//! and traffic-light classification.

mod band;
mod runner;
mod stats;
mod traffic;

pub use band::{confidence_band, BandPoint};
pub use runner::{
    run_backtest, run_backtest_with, BacktestConfig, BacktestResult, BacktestRow, DyadForecaster,
};
pub use stats::{error_stats, week_errors, ErrorStats};
pub use traffic::{traffic_light, TrafficClass};
