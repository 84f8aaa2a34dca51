use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the forecasting stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastConfig {
    /// Forecast horizon in weeks.
    pub n_ahead: usize,
    /// Length of each fitting window (weeks).
    pub prediction_win: usize,
    /// Elastic-net mixing parameter: 1 = pure L1, 0 = pure L2.
    pub alpha: f64,
    /// Observations used by the local covariate models (weeks).
    pub burn: usize,
    /// Training span preceding the observation point (weeks).
    pub training_weeks: usize,
    /// Number of penalties on the cross-validation grid.
    pub lambda_grid_size: usize,
    /// Smallest grid penalty as a fraction of lambda_max.
    pub lambda_min_ratio: f64,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        ForecastConfig {
            n_ahead: 4,
            prediction_win: 12,
            alpha: 0.5,
            burn: 12,
            training_weeks: 52,
            lambda_grid_size: 100,
            lambda_min_ratio: 1e-4,
        }
    }
}

impl ForecastConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.n_ahead < 1 {
            return Err(Error::InvalidConfig("n.ahead must be >= 1".into()));
        }
        if self.lambda_grid_size < 2 {
            return Err(Error::InvalidConfig("lambda grid needs >= 2 points".into()));
        }
        if !(self.lambda_min_ratio > 0.0 && self.lambda_min_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda.min.ratio must lie in (0, 1), got {}",
                self.lambda_min_ratio
            )));
        }
        if self.training_weeks < 50 {
            return Err(Error::InvalidConfig(format!(
                "training.weeks must be >= 50, got {}",
                self.training_weeks
            )));
        }
        if self.prediction_win < 2 {
            return Err(Error::InvalidConfig("prediction.win must be >= 2".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_valid() {
        ForecastConfig::default().validate().unwrap();
    }

    #[test]
    fn bad_alpha_rejected() {
        let mut c = ForecastConfig {
            alpha: 1.5,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c.alpha = -0.1;
        assert!(c.validate().is_err());
    }
}
