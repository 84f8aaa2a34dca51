//! Penalty grid construction and rolling-window cross-validation of lambda.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::config::ForecastConfig;
use crate::forecast::design::{window_design, DesignBase, DesignMatrix};
use crate::forecast::enet::{enet_fit, EnetParams};
use crate::timeseries::stats;

/// Log-spaced descending penalty grid. The top value lambda_max is the
/// smallest penalty with an empty active set:
/// max_j |<standardized x_j, centered y>| / (N * alpha).
pub fn lambda_grid(design: &DesignMatrix, alpha: f64, cfg: &ForecastConfig) -> Result<Vec<f64>> {
    if alpha <= 0.0 {
        return Err(Error::InvalidConfig(
            "lambda grid needs alpha > 0 (pure ridge has no sparse boundary)".into(),
        ));
    }
    let n = design.n_rows() as f64;
    let ybar = stats::mean(&design.y);
    let mut lambda_max = 0.0f64;
    for col in &design.x {
        let m = col.iter().sum::<f64>() / n;
        let sd = (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt();
        if sd <= 0.0 {
            continue;
        }
        let dot: f64 = col
            .iter()
            .zip(&design.y)
            .map(|(x, y)| ((x - m) / sd) * (y - ybar))
            .sum();
        lambda_max = lambda_max.max(dot.abs() / (n * alpha));
    }
    if lambda_max <= 0.0 || !lambda_max.is_finite() {
        return Err(Error::ZeroTarget);
    }
    let size = cfg.lambda_grid_size;
    let log_max = lambda_max.ln();
    let log_min = (lambda_max * cfg.lambda_min_ratio).ln();
    Ok((0..size)
        .map(|k| (log_max + (log_min - log_max) * k as f64 / (size - 1) as f64).exp())
        .collect())
}

/// Outcome of the rolling selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaSelection {
    pub lambda: f64,
    /// True when no window beat the target's variance and the global
    /// minimum-MSE lambda was used instead.
    pub fallback: bool,
    pub windows_evaluated: usize,
    pub windows_qualifying: usize,
}

const MIN_FIT_ROWS: usize = 4;

/// Held-out forecast MSE of one fitted window: predict the `n_ahead` weeks
/// right after the window from their actual covariate values.
fn holdout_mse(
    base: &DesignBase,
    fit: &crate::forecast::enet::EnetFit,
    holdout_start: usize,
    n_ahead: usize,
) -> Option<f64> {
    let mut errs = Vec::new();
    for i in holdout_start..(holdout_start + n_ahead).min(base.n_weeks()) {
        let Some(actual) = base.y[i] else { continue };
        let mut row = Vec::with_capacity(fit.columns.len());
        let mut complete = true;
        for name in &fit.columns {
            let j = base.columns.iter().position(|c| c == name)?;
            match base.cells[j][i] {
                Some(v) => row.push(v),
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if complete {
            errs.push((fit.predict(&row) - actual).powi(2));
        }
    }
    if errs.is_empty() {
        None
    } else {
        Some(stats::mean(&errs))
    }
}

/// Slides a `prediction_win`-week fitting window through the trailing
/// training period one week at a time; per window the grid penalty with the
/// best held-out forecast MSE is kept. Among windows whose best MSE is at
/// most the sample variance of the target over the training period, the
/// smallest such penalty wins; if none qualifies, the penalty of the
/// globally best window is returned with `fallback = true`.
pub fn rolling_lambda_select(base: &DesignBase, cfg: &ForecastConfig) -> Result<LambdaSelection> {
    let n = base.n_weeks();
    let needed = cfg.burn + cfg.prediction_win + cfg.n_ahead;
    if n < needed {
        return Err(Error::InsufficientHistory(format!(
            "need >= {needed} weeks (burn + prediction.win + n.ahead), have {n}"
        )));
    }
    let train_start = n.saturating_sub(cfg.training_weeks);

    // One shared grid from the whole training region keeps per-window
    // selections comparable.
    let train_design = window_design(base, train_start, n - train_start, MIN_FIT_ROWS)?;
    if train_design.n_cols() == 0 {
        // No usable covariate anywhere: any penalty yields the intercept
        // model; report the degenerate selection.
        return Ok(LambdaSelection {
            lambda: 0.0,
            fallback: true,
            windows_evaluated: 0,
            windows_qualifying: 0,
        });
    }
    let grid = lambda_grid(&train_design, cfg.alpha, cfg)?;
    let target_var = {
        let ys: Vec<f64> = (train_start..n).filter_map(|i| base.y[i]).collect();
        if ys.len() < 2 {
            return Err(Error::InsufficientHistory(
                "too few observed target values in the training period".into(),
            ));
        }
        stats::sample_var(&ys)
    };

    let last_start = n.checked_sub(cfg.prediction_win + cfg.n_ahead).ok_or_else(|| {
        Error::InsufficientHistory("span shorter than prediction.win + n.ahead".into())
    })?;
    let mut best_per_window: Vec<(f64, f64)> = Vec::new(); // (mse, lambda)
    for start in train_start..=last_start {
        let Ok(design) = window_design(base, start, cfg.prediction_win, MIN_FIT_ROWS) else {
            continue;
        };
        if design.n_cols() == 0 {
            continue;
        }
        let mut warm: Option<Vec<f64>> = None;
        let mut window_best: Option<(f64, f64)> = None;
        for &lambda in &grid {
            let Ok(fit) = enet_fit(
                &design,
                cfg.alpha,
                lambda,
                None,
                warm.as_deref(),
                EnetParams::default(),
            ) else {
                continue;
            };
            warm = Some(fit.std_coefficients.clone());
            if let Some(mse) = holdout_mse(base, &fit, start + cfg.prediction_win, cfg.n_ahead) {
                if window_best.is_none_or(|(best, _)| mse < best) {
                    window_best = Some((mse, lambda));
                }
            }
        }
        if let Some(b) = window_best {
            best_per_window.push(b);
        }
    }
    if best_per_window.is_empty() {
        return Err(Error::InsufficientHistory(
            "no usable fitting window in the training period".into(),
        ));
    }
    let qualifying: Vec<&(f64, f64)> = best_per_window
        .iter()
        .filter(|(mse, _)| *mse <= target_var)
        .collect();
    if qualifying.is_empty() {
        let (_, lambda) = best_per_window
            .iter()
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("nonempty");
        return Ok(LambdaSelection {
            lambda: *lambda,
            fallback: true,
            windows_evaluated: best_per_window.len(),
            windows_qualifying: 0,
        });
    }
    let lambda = qualifying
        .iter()
        .map(|(_, l)| *l)
        .fold(f64::INFINITY, f64::min);
    Ok(LambdaSelection {
        lambda,
        fallback: false,
        windows_evaluated: best_per_window.len(),
        windows_qualifying: qualifying.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::design::build_design;
    use crate::rng::{rng_for, standard_normal};
    use crate::timeseries::{align, AlignRange, WeekIndex, WeeklySeries};

    fn wk(y: i32, w: u32) -> WeekIndex {
        WeekIndex::new(y, w).unwrap()
    }

    fn design_from(xcols: Vec<Vec<f64>>, y: Vec<f64>) -> DesignMatrix {
        let n = y.len();
        DesignMatrix {
            weeks: (0..n).map(|i| wk(2018, 1).plus_weeks(i as i64)).collect(),
            columns: (0..xcols.len()).map(|j| format!("c{j}")).collect(),
            x: xcols,
            y,
        }
    }

    #[test]
    fn grid_is_strictly_decreasing_and_bounded() {
        let mut rng = rng_for(73, &["grid"]);
        let x: Vec<f64> = (0..30).map(|_| standard_normal(&mut rng)).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + standard_normal(&mut rng)).collect();
        let d = design_from(vec![x], y);
        let cfg = ForecastConfig::default();
        let grid = lambda_grid(&d, 0.5, &cfg).unwrap();
        assert_eq!(grid.len(), cfg.lambda_grid_size);
        for pair in grid.windows(2) {
            assert!(pair[1] < pair[0]);
        }
        assert!((grid.last().unwrap() / grid[0] - cfg.lambda_min_ratio).abs() < 1e-12);
    }

    #[test]
    fn active_set_empty_at_lambda_max() {
        let mut rng = rng_for(79, &["gridmax"]);
        let x: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..40).map(|_| standard_normal(&mut rng)).collect())
            .collect();
        let y: Vec<f64> = (0..40)
            .map(|i| 1.0 + 2.0 * x[0][i] - x[2][i] + 0.1 * standard_normal(&mut rng))
            .collect();
        let d = design_from(x, y);
        let grid = lambda_grid(&d, 0.5, &ForecastConfig::default()).unwrap();
        let at_max = enet_fit(&d, 0.5, grid[0], None, None, EnetParams::default()).unwrap();
        assert!(at_max.active_set().is_empty(), "{:?}", at_max.active_set());
        // One step below the boundary something activates.
        let below = enet_fit(&d, 0.5, grid[1], None, None, EnetParams::default()).unwrap();
        assert!(!below.active_set().is_empty());
    }

    #[test]
    fn doubling_y_doubles_lambda_max() {
        let mut rng = rng_for(83, &["griddouble"]);
        let x: Vec<f64> = (0..30).map(|_| standard_normal(&mut rng)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v + standard_normal(&mut rng)).collect();
        let d1 = design_from(vec![x.clone()], y.clone());
        let d2 = design_from(vec![x], y.iter().map(|v| 2.0 * v).collect());
        let cfg = ForecastConfig::default();
        let g1 = lambda_grid(&d1, 0.5, &cfg).unwrap();
        let g2 = lambda_grid(&d2, 0.5, &cfg).unwrap();
        assert!((g2[0] / g1[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn constant_target_errors() {
        let mut rng = rng_for(89, &["gridzero"]);
        let x: Vec<f64> = (0..20).map(|_| standard_normal(&mut rng)).collect();
        let d = design_from(vec![x], vec![5.0; 20]);
        assert!(matches!(
            lambda_grid(&d, 0.5, &ForecastConfig::default()),
            Err(Error::ZeroTarget)
        ));
        let d2 = design_from(vec![vec![1.0; 20]], (0..20).map(|i| i as f64).collect());
        assert!(lambda_grid(&d2, 0.5, &ForecastConfig::default()).is_err());
    }

    fn linked_base(n: usize, noise: f64, label: &str) -> DesignBase {
        let mut rng = rng_for(97, &[label]);
        let mut x = vec![0.0f64];
        for _ in 1..n {
            let prev = *x.last().unwrap();
            x.push(0.7 * prev + standard_normal(&mut rng));
        }
        let y: Vec<Option<f64>> = (0..n)
            .map(|i| {
                let lagged = if i >= 2 { x[i - 2] } else { 0.0 };
                Some(10.0 + 3.0 * lagged + noise * standard_normal(&mut rng))
            })
            .collect();
        let target = WeeklySeries::new("applicant.DE", None, wk(2017, 1), y).unwrap();
        let cov = WeeklySeries::new(
            "gt.Visa",
            None,
            wk(2017, 1),
            x.iter().map(|v| Some(*v)).collect(),
        )
        .unwrap();
        let panel = align(vec![target, cov], AlignRange::Union, "applicant.DE").unwrap();
        build_design(&panel, &[("gt.Visa".to_string(), 2)])
    }

    #[test]
    fn informative_covariate_selects_without_fallback() {
        let base = linked_base(80, 0.2, "roll-good");
        let sel = rolling_lambda_select(&base, &ForecastConfig::default()).unwrap();
        assert!(!sel.fallback);
        assert!(sel.windows_qualifying > 0);
        assert!(sel.lambda > 0.0);
    }

    #[test]
    fn pure_noise_falls_back_to_global_best() {
        let mut rng = rng_for(101, &["roll-noise"]);
        let n = 80;
        let y: Vec<Option<f64>> = (0..n).map(|_| Some(standard_normal(&mut rng) * 100.0)).collect();
        let x: Vec<Option<f64>> = (0..n).map(|_| Some(standard_normal(&mut rng))).collect();
        let target = WeeklySeries::new("applicant.DE", None, wk(2017, 1), y).unwrap();
        let cov = WeeklySeries::new("gt.Visa", None, wk(2017, 1), x).unwrap();
        let panel = align(vec![target, cov], AlignRange::Union, "applicant.DE").unwrap();
        let base = build_design(&panel, &[]);
        let sel = rolling_lambda_select(&base, &ForecastConfig::default()).unwrap();
        // Forecasting the level of white noise from a useless covariate:
        // held-out MSE hovers around twice the variance, so the variance
        // gate usually fails and the global-best fallback engages. Either
        // way the call must succeed and return a usable penalty.
        assert!(sel.lambda >= 0.0);
        assert!(sel.windows_evaluated > 0);
    }

    #[test]
    fn too_short_history_errors() {
        let base = linked_base(20, 0.2, "roll-short");
        assert!(matches!(
            rolling_lambda_select(&base, &ForecastConfig::default()),
            Err(Error::InsufficientHistory(_))
        ));
    }

    #[test]
    fn single_window_returns_its_best() {
        let base = linked_base(80, 0.2, "roll-single");
        let n = base.n_weeks();
        let mut cfg = ForecastConfig::default();
        // Exactly one window fits: training region == prediction_win + n_ahead.
        cfg.training_weeks = 52.max(cfg.prediction_win + cfg.n_ahead);
        let trimmed = DesignBase {
            weeks: base.weeks[n - 16..].to_vec(),
            columns: base.columns.clone(),
            cells: base.cells.iter().map(|c| c[n - 16..].to_vec()).collect(),
            y: base.y[n - 16..].to_vec(),
        };
        cfg.burn = 0;
        let sel = rolling_lambda_select(&trimmed, &cfg).unwrap();
        assert_eq!(sel.windows_evaluated, 1);
    }
}
