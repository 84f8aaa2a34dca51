//! Weighted elastic net by cyclic coordinate descent on standardized
//! columns.
//!
//! The objective minimized (observation weights w_i, penalty mix alpha):
//!
//! (1/N) sum_i w_i (y_i - b0 - b'x_i)^2 / 2
//!     + lambda [ (1 - alpha)/2 ||b||_2^2 + alpha ||b||_1 ]
//!
//! with the penalty applied on the standardized scale. At lambda = 0 this is
//! ordinary least squares; alpha = 1 is the lasso, alpha = 0 ridge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::design::DesignMatrix;

/// Convergence controls. The contract is a sweep-to-sweep maximum
/// coefficient change below 1e-7; the default tolerance is tighter so the
/// subgradient conditions hold with margin.
#[derive(Debug, Clone, Copy)]
pub struct EnetParams {
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for EnetParams {
    fn default() -> Self {
        EnetParams {
            tol: 1e-8,
            max_sweeps: 10_000,
        }
    }
}

/// A fitted elastic net. Coefficients are reported on both scales; dropped
/// columns carry an exact zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnetFit {
    pub columns: Vec<String>,
    /// Intercept on the original scale.
    pub intercept: f64,
    /// Coefficients on the original scale, aligned with `columns`.
    pub coefficients: Vec<f64>,
    /// Coefficients on the standardized scale.
    pub std_coefficients: Vec<f64>,
    pub column_means: Vec<f64>,
    pub column_sds: Vec<f64>,
    pub lambda: f64,
    pub alpha: f64,
    pub training_mse: f64,
    /// Objective value after each sweep; non-increasing.
    pub objective_path: Vec<f64>,
    pub sweeps: usize,
}

impl EnetFit {
    pub fn active_set(&self) -> Vec<&str> {
        self.columns
            .iter()
            .zip(&self.std_coefficients)
            .filter(|(_, b)| **b != 0.0)
            .map(|(c, _)| c.as_str())
            .collect()
    }

    /// Prediction for one original-scale row ordered like `columns`.
    pub fn predict(&self, row: &[f64]) -> f64 {
        self.intercept
            + row
                .iter()
                .zip(&self.coefficients)
                .map(|(x, b)| x * b)
                .sum::<f64>()
    }
}

fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// (means, sds, standardized columns).
type Standardized = (Vec<f64>, Vec<f64>, Vec<Vec<f64>>);

/// Per-column mean and population standard deviation.
fn standardize(design: &DesignMatrix) -> Result<Standardized> {
    let n = design.n_rows() as f64;
    let mut means = Vec::with_capacity(design.n_cols());
    let mut sds = Vec::with_capacity(design.n_cols());
    let mut std_cols = Vec::with_capacity(design.n_cols());
    for (j, col) in design.x.iter().enumerate() {
        let m = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        if sd <= 0.0 {
            return Err(Error::InsufficientData(format!(
                "column '{}' is constant",
                design.columns[j]
            )));
        }
        std_cols.push(col.iter().map(|v| (v - m) / sd).collect());
        means.push(m);
        sds.push(sd);
    }
    Ok((means, sds, std_cols))
}

/// Fits the elastic net at one (alpha, lambda). `weights` default to 1;
/// `warm_start` (standardized-scale coefficients) seeds the descent when
/// walking a lambda path.
pub fn enet_fit(
    design: &DesignMatrix,
    alpha: f64,
    lambda: f64,
    weights: Option<&[f64]>,
    warm_start: Option<&[f64]>,
    params: EnetParams,
) -> Result<EnetFit> {
    if !(0.0..=1.0).contains(&alpha) || lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "bad penalty: alpha {alpha}, lambda {lambda}"
        )));
    }
    let n = design.n_rows();
    let p = design.n_cols();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "elastic net needs >= 2 rows, got {n}"
        )));
    }
    for col in &design.x {
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design column"));
        }
    }
    if design.y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("target"));
    }
    let w: Vec<f64> = match weights {
        Some(w) => {
            if w.len() != n || w.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidConfig("bad observation weights".into()));
            }
            w.to_vec()
        }
        None => vec![1.0; n],
    };
    let w_total: f64 = w.iter().sum();
    if w_total <= 0.0 {
        return Err(Error::InvalidConfig("weights sum to zero".into()));
    }

    let (means, sds, xs) = standardize(design)?;
    let nf = n as f64;
    // Weighted quadratic term per column: (1/N) sum w x~^2.
    let quad: Vec<f64> = xs
        .iter()
        .map(|col| col.iter().zip(&w).map(|(x, wi)| wi * x * x).sum::<f64>() / nf)
        .collect();
    let denom: Vec<f64> = quad.iter().map(|q| q + lambda * (1.0 - alpha)).collect();

    let mut beta: Vec<f64> = match warm_start {
        Some(b) if b.len() == p => b.to_vec(),
        _ => vec![0.0; p],
    };
    let mut intercept = 0.0;
    // Residuals r_i = y_i - intercept - sum_j beta_j x~_ij.
    let mut residual: Vec<f64> = design.y.clone();
    for (j, b) in beta.iter().enumerate() {
        if *b != 0.0 {
            for i in 0..n {
                residual[i] -= b * xs[j][i];
            }
        }
    }

    let objective = |residual: &[f64], beta: &[f64]| -> f64 {
        let loss = residual
            .iter()
            .zip(&w)
            .map(|(r, wi)| wi * r * r)
            .sum::<f64>()
            / (2.0 * nf);
        let l2 = beta.iter().map(|b| b * b).sum::<f64>();
        let l1 = beta.iter().map(|b| b.abs()).sum::<f64>();
        loss + lambda * ((1.0 - alpha) / 2.0 * l2 + alpha * l1)
    };

    let mut objective_path = Vec::new();
    let mut sweeps = 0;
    let mut last_change = f64::INFINITY;
    while sweeps < params.max_sweeps {
        sweeps += 1;
        let mut max_change = 0.0f64;

        // Intercept: exact weighted minimizer given the rest.
        let shift = residual.iter().zip(&w).map(|(r, wi)| wi * r).sum::<f64>() / w_total;
        if shift != 0.0 {
            intercept += shift;
            for r in residual.iter_mut() {
                *r -= shift;
            }
            max_change = max_change.max(shift.abs());
        }

        for j in 0..p {
            let old = beta[j];
            // z = (1/N) sum_i w_i x~_ij (r_i + x~_ij old)
            let mut z = 0.0;
            for i in 0..n {
                z += w[i] * xs[j][i] * residual[i];
            }
            z = z / nf + quad[j] * old;
            let new = soft_threshold(z, lambda * alpha) / denom[j];
            if new != old {
                let delta = new - old;
                for i in 0..n {
                    residual[i] -= delta * xs[j][i];
                }
                beta[j] = new;
                max_change = max_change.max(delta.abs());
            }
        }

        objective_path.push(objective(&residual, &beta));
        last_change = max_change;
        if max_change < params.tol {
            break;
        }
    }
    if last_change >= params.tol {
        return Err(Error::NoConvergence {
            sweeps,
            last_change,
        });
    }

    let coefficients: Vec<f64> = beta.iter().zip(&sds).map(|(b, s)| b / s).collect();
    let intercept_original =
        intercept - coefficients.iter().zip(&means).map(|(b, m)| b * m).sum::<f64>();
    let training_mse = residual
        .iter()
        .zip(&w)
        .map(|(r, wi)| wi * r * r)
        .sum::<f64>()
        / w_total;

    Ok(EnetFit {
        columns: design.columns.clone(),
        intercept: intercept_original,
        coefficients,
        std_coefficients: beta,
        column_means: means,
        column_sds: sds,
        lambda,
        alpha,
        training_mse,
        objective_path,
        sweeps,
    })
}
