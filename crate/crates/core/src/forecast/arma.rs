//! ARMA(1,1) with intercept, fitted by conditional least squares:
//! e_t = y_t - c - phi y_{t-1} - theta e_{t-1}, e_0 = 0, minimizing
//! sum e_t^2 by Levenberg-Marquardt with exact recursive gradients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::stats;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ArmaFit {
    pub c: f64,
    pub phi: f64,
    pub theta: f64,
    /// Conditional sum of squared residuals at the optimum.
    pub css: f64,
    /// Last in-sample residual, the MA state for forecasting.
    pub last_residual: f64,
    /// Last observed value, the AR state for forecasting.
    pub last_value: f64,
}

impl ArmaFit {
    /// Point forecasts for horizons 1..=h. The MA term contributes only at
    /// horizon one; beyond that the recursion is ŷ = c + phi ŷ.
    pub fn forecast(&self, horizon: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(horizon);
        let mut prev = self.last_value;
        for h in 0..horizon {
            let ma = if h == 0 { self.theta * self.last_residual } else { 0.0 };
            let next = self.c + self.phi * prev + ma;
            out.push(next);
            prev = next;
        }
        out
    }
}

/// Residuals and their partial derivatives w.r.t. (c, phi, theta).
fn residuals_and_jacobian(y: &[f64], c: f64, phi: f64, theta: f64) -> (Vec<f64>, [Vec<f64>; 3]) {
    let n = y.len();
    let mut e = vec![0.0; n];
    let mut dc = vec![0.0; n];
    let mut dphi = vec![0.0; n];
    let mut dtheta = vec![0.0; n];
    for t in 1..n {
        e[t] = y[t] - c - phi * y[t - 1] - theta * e[t - 1];
        dc[t] = -1.0 - theta * dc[t - 1];
        dphi[t] = -y[t - 1] - theta * dphi[t - 1];
        dtheta[t] = -e[t - 1] - theta * dtheta[t - 1];
    }
    (e, [dc, dphi, dtheta])
}

fn css_of(e: &[f64]) -> f64 {
    e.iter().skip(1).map(|v| v * v).sum()
}

#[allow(clippy::needless_range_loop)]
fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    // Gaussian elimination with partial pivoting on a 3x3 system.
    let mut m = [
        [a[0][0], a[0][1], a[0][2], b[0]],
        [a[1][0], a[1][1], a[1][2], b[1]],
        [a[2][0], a[2][1], a[2][2], b[2]],
    ];
    for col in 0..3 {
        let pivot = (col..3).max_by(|i, j| m[*i][col].abs().total_cmp(&m[*j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = m[row][3];
        for k in (row + 1)..3 {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// Fits ARMA(1,1) by conditional least squares. Errors when the data is too
/// short; returns `Err(NoConvergence)` when the optimizer stalls outside the
/// stationarity/invertibility region or on non-finite values.
pub fn fit_arma11(y: &[f64]) -> Result<ArmaFit> {
    let n = y.len();
    if n < 8 {
        return Err(Error::InsufficientData(format!(
            "ARMA(1,1) needs >= 8 observations, got {n}"
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("ARMA input"));
    }
    let mean = stats::mean(y);
    // Lag-1 autocorrelation as the starting AR coefficient.
    let mut num = 0.0;
    let mut den = 0.0;
    for t in 0..n {
        let d = y[t] - mean;
        den += d * d;
        if t > 0 {
            num += d * (y[t - 1] - mean);
        }
    }
    let mut phi = if den > 0.0 { (num / den).clamp(-0.9, 0.9) } else { 0.0 };
    let mut theta = 0.0;
    let mut c = mean * (1.0 - phi);

    let (e0, _) = residuals_and_jacobian(y, c, phi, theta);
    let mut css = css_of(&e0);
    let mut mu = 1e-3;
    let mut converged = false;
    for _ in 0..200 {
        let (e, jac) = residuals_and_jacobian(y, c, phi, theta);
        // Normal equations J'J delta = -J'e over t = 1..n.
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jte = [0.0f64; 3];
        for t in 1..n {
            let row = [jac[0][t], jac[1][t], jac[2][t]];
            for i in 0..3 {
                for j in 0..3 {
                    jtj[i][j] += row[i] * row[j];
                }
                jte[i] += row[i] * e[t];
            }
        }
        let mut improved = false;
        for _ in 0..25 {
            let mut damped = jtj;
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] += mu * (jtj[i][i].max(1e-12));
            }
            let Some(step) = solve3(damped, [-jte[0], -jte[1], -jte[2]]) else {
                mu *= 4.0;
                continue;
            };
            let cand = (c + step[0], phi + step[1], theta + step[2]);
            if !(cand.0.is_finite() && cand.1.is_finite() && cand.2.is_finite()) {
                mu *= 4.0;
                continue;
            }
            let (e_new, _) = residuals_and_jacobian(y, cand.0, cand.1, cand.2);
            let css_new = css_of(&e_new);
            if css_new.is_finite() && css_new <= css {
                let step_size = step.iter().fold(0.0f64, |a, s| a.max(s.abs()));
                let gain = css - css_new;
                c = cand.0;
                phi = cand.1;
                theta = cand.2;
                css = css_new;
                mu = (mu / 3.0).max(1e-12);
                improved = true;
                if step_size < 1e-11 * (1.0 + phi.abs() + theta.abs() + c.abs())
                    || gain < 1e-15 * (1.0 + css)
                {
                    converged = true;
                }
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            // No downhill step found: treat the current point as the CSS
            // optimum (gradient numerically zero).
            converged = true;
        }
        if converged {
            break;
        }
    }
    if !converged || !phi.is_finite() || !theta.is_finite() || !c.is_finite() {
        return Err(Error::NoConvergence {
            sweeps: 200,
            last_change: f64::NAN,
        });
    }
    if phi.abs() >= 0.999 || theta.abs() >= 0.999 {
        // Outside the stationary/invertible region: the forecast recursion
        // would be explosive or the MA state meaningless.
        return Err(Error::NoConvergence {
            sweeps: 200,
            last_change: phi.abs().max(theta.abs()),
        });
    }
    let (e, _) = residuals_and_jacobian(y, c, phi, theta);
    Ok(ArmaFit {
        c,
        phi,
        theta,
        css,
        last_residual: *e.last().expect("n >= 8"),
        last_value: y[n - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_for, standard_normal};

    #[test]
    fn noiseless_ar1_recovers_exactly() {
        // y_t = mu + phi (y_{t-1} - mu), phi = 0.8, from y_0 = mu + 10.
        let (mu, phi) = (50.0, 0.8);
        let mut y = vec![mu + 10.0];
        for _ in 1..60 {
            y.push(mu + phi * (y.last().unwrap() - mu));
        }
        let fit = fit_arma11(&y).unwrap();
        assert!((fit.phi - phi).abs() < 1e-9, "phi = {}", fit.phi);
        assert!((fit.c - mu * (1.0 - phi)).abs() < 1e-7, "c = {}", fit.c);
        let last = *y.last().unwrap();
        let fc = fit.forecast(4);
        for (h, value) in fc.iter().enumerate() {
            let expect = mu + phi.powi(h as i32 + 1) * (last - mu);
            assert!(
                (value - expect).abs() < 1e-8,
                "h={} got {value} want {expect}",
                h + 1
            );
        }
    }

    #[test]
    fn white_noise_forecasts_the_mean() {
        let mut rng = rng_for(103, &["arma-wn"]);
        let mu = 200.0;
        let y: Vec<f64> = (0..300).map(|_| mu + standard_normal(&mut rng)).collect();
        let fit = fit_arma11(&y).unwrap();
        let fc = fit.forecast(4);
        for v in fc {
            assert!((v - mu).abs() < 1.0, "forecast {v} vs mean {mu}");
        }
    }

    #[test]
    fn arma_with_ma_term_fits_better_than_ar_alone() {
        let mut rng = rng_for(107, &["arma-ma"]);
        let (phi, theta) = (0.6, 0.5);
        let mut y = vec![0.0];
        let mut prev_e = 0.0;
        for _ in 1..400 {
            let e = standard_normal(&mut rng);
            y.push(10.0 + phi * y.last().unwrap() + e + theta * prev_e);
            prev_e = e;
        }
        let fit = fit_arma11(&y).unwrap();
        assert!((fit.phi - phi).abs() < 0.15, "phi = {}", fit.phi);
        assert!((fit.theta - theta).abs() < 0.2, "theta = {}", fit.theta);
    }

    #[test]
    fn too_short_errors() {
        assert!(fit_arma11(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn nan_input_errors() {
        let mut y = vec![1.0; 30];
        y[7] = f64::NAN;
        assert!(matches!(fit_arma11(&y), Err(Error::NonFinite(_))));
    }

    #[test]
    fn constant_series_forecasts_the_constant() {
        let y = vec![42.0; 40];
        // css surface is flat at zero; whatever parameters come back, the
        // forecast must stay at the constant.
        if let Ok(fit) = fit_arma11(&y) {
            for v in fit.forecast(4) {
                assert!((v - 42.0).abs() < 1e-6);
            }
        }
    }
}
