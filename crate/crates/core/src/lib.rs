//! Early-warning signals and short-term forecasts for dyadic weekly flow
//! series (one origin, one destination, one count series per pair).
//!
//! The pipeline:
//! weighted event indices -> panel filtering -> change points, momentum and
//! lead-lag signals -> per-dyad elastic-net fits on rolling windows with
//! cross-validated penalties -> 1..4-week-ahead forecasts benchmarked
//! against ARMA(1,1) -> week-by-week back-testing and variable ranking.

pub mod backtest;
pub mod earlywarn;
pub mod error;
pub mod events;
pub mod forecast;
pub mod io;
pub mod ranking;
pub mod rng;
pub mod synth;
pub mod timeseries;

pub use error::{Error, ErrorKind, Result};
pub use timeseries::{MonthlySeries, Panel, WeekIndex, WeeklySeries};
