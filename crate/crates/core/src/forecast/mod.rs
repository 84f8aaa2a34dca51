//! Per-dyad adaptive elastic-net forecasting: coordinate-descent fits,
//! penalty cross-validation on moving windows, covariate simulation
//! (VAR -> ARMA(1,1) -> mean), and the ARMA benchmark.

mod arma;
mod config;
mod covsim;
mod design;
mod dyad;
mod enet;
mod lambda;
mod var;

pub use arma::{fit_arma11, ArmaFit};
pub use config::ForecastConfig;
pub use covsim::{forecast_covariates, CovariatePath, SimMethod};
pub use design::{build_design, lagged_name, parse_lagged, window_design, DesignBase, DesignMatrix};
pub use dyad::{benchmark_arima, forecast_applications, DyadForecast};
pub use enet::{enet_fit, EnetFit, EnetParams};
pub use lambda::{lambda_grid, rolling_lambda_select, LambdaSelection};
pub use var::{fit_var1, VarFit};
