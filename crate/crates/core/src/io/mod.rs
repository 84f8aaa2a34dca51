//! The operational shell: configuration, file-based ingestion for all data
//! tiers, command orchestration, and report/plot emission.

mod bundle;
mod commands;
mod config;
mod reports;
mod svg;
mod synthgen;

pub use bundle::{ingest, load, write_bundle, BundleAnalyzer, DatasetBundle};
pub use commands::{
    cmd_backtest, cmd_earlywarn, cmd_forecast, cmd_ingest, cmd_report, cmd_synth, read_dir_bytes,
};
pub use config::{DataPaths, RunConfig, DEFAULT_TOPICS};
pub use reports::{forecast_rows, CommandOutcome, ForecastRow};
pub use svg::{backtest_chart, heatmap_chart};
pub use synthgen::{synth_bundle, SynthBundleConfig, SynthDyadTruth};
