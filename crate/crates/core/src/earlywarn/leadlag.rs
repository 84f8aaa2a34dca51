//! Lead-lag estimation: maximize the absolute Hayashi-Yoshida contrast over
//! integer week shifts, with permutation-based significance.

use serde::{Deserialize, Serialize};

use crate::earlywarn::config::EarlyWarningConfig;
use crate::earlywarn::hayashi_yoshida::hy_covariance;
use crate::error::{Error, Result};
use crate::rng;
use crate::timeseries::WeeklySeries;

/// Estimated lag between two series. Positive `theta_hat` means the first
/// series (X) leads the second (Y) by that many weeks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagEstimate {
    pub theta_hat: i64,
    pub contrast_value: f64,
    pub p_value: f64,
    pub leader: String,
    pub lagger: String,
}

/// The full contrast scan: one entry per lag in the search grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LagScanEntry {
    pub theta: i64,
    pub contrast: f64,
    /// Permutation p-value of |U(theta)| against the same lag under random
    /// circular shifts of Y.
    pub p_value: f64,
}

#[derive(Debug, Clone)]
pub struct LeadLagScan {
    pub estimate: LagEstimate,
    pub entries: Vec<LagScanEntry>,
}

/// Lags visited in tie-break order: 0, +1, -1, +2, -2, ... so that keeping
/// the first strict maximum implements "smaller |theta| first, then the
/// positive lag".
fn lag_grid(delta_max: i64) -> Vec<i64> {
    let mut grid = vec![0];
    for k in 1..=delta_max {
        grid.push(k);
        grid.push(-k);
    }
    grid
}

/// U_n(theta) = HY(X, Y shifted back by theta): the value Y takes at week
/// w + theta is compared against X at week w.
fn contrast(x: &WeeklySeries, y: &WeeklySeries, theta: i64) -> Option<f64> {
    hy_covariance(x, &y.shift_weeks(-theta)).ok()
}

fn rotate_values(values: &[Option<f64>], offset: usize) -> Vec<Option<f64>> {
    let n = values.len();
    (0..n).map(|i| values[(i + offset) % n]).collect()
}

/// Scans the lag grid, picks the argmax of |U|, and attaches permutation
/// p-values (circular shifts of Y by offsets larger than `delta_max`).
pub fn lead_lag_scan(
    x: &WeeklySeries,
    y: &WeeklySeries,
    cfg: &EarlyWarningConfig,
    seed: u64,
) -> Result<LeadLagScan> {
    let grid = lag_grid(cfg.delta_max);
    let observed: Vec<(i64, Option<f64>)> =
        grid.iter().map(|&t| (t, contrast(x, y, t))).collect();

    let mut best: Option<(i64, f64)> = None;
    for (t, u) in &observed {
        if let Some(u) = u {
            if !u.is_finite() {
                continue;
            }
            if best.is_none_or(|(_, b)| u.abs() > b.abs()) {
                best = Some((*t, *u));
            }
        }
    }
    let (theta_hat, u_hat) = best.ok_or(Error::ContrastUndefined)?;

    // Null distribution from circular shifts that destroy alignment at every
    // lag inside the search window.
    let n = y.len();
    let min_off = (cfg.delta_max + 1) as usize;
    let max_off = n.saturating_sub(min_off);
    if max_off < min_off {
        return Err(Error::InsufficientData(format!(
            "series of {n} weeks is too short for a permutation test with delta_max {}",
            cfg.delta_max
        )));
    }
    let mut rng = rng::rng_for(seed, &["leadlag", &x.id, &y.id]);
    let mut exceed_max = 0usize; // permuted max |U| >= observed max
    let mut exceed_at: Vec<usize> = vec![0; grid.len()]; // per-lag exceedances
    for _ in 0..cfg.n_permutations {
        let offset = min_off + rng::uniform_index(&mut rng, max_off - min_off + 1);
        let permuted = WeeklySeries::new(
            y.id.clone(),
            y.origin.clone(),
            y.start(),
            rotate_values(y.values(), offset),
        )
        .expect("same length");
        let mut perm_max = 0.0f64;
        for (gi, &t) in grid.iter().enumerate() {
            let u = contrast(x, &permuted, t).unwrap_or(0.0);
            if u.abs() >= perm_max {
                perm_max = u.abs();
            }
            if let (_, Some(obs)) = observed[gi] {
                if u.abs() >= obs.abs() {
                    exceed_at[gi] += 1;
                }
            }
        }
        if perm_max >= u_hat.abs() {
            exceed_max += 1;
        }
    }
    let denom = (cfg.n_permutations + 1) as f64;
    let p_value = (1 + exceed_max) as f64 / denom;

    let entries = grid
        .iter()
        .enumerate()
        .filter_map(|(gi, &t)| {
            observed[gi].1.map(|u| LagScanEntry {
                theta: t,
                contrast: u,
                p_value: (1 + exceed_at[gi]) as f64 / denom,
            })
        })
        .collect();

    let (leader, lagger) = if theta_hat >= 0 {
        (x.id.clone(), y.id.clone())
    } else {
        (y.id.clone(), x.id.clone())
    };
    Ok(LeadLagScan {
        estimate: LagEstimate {
            theta_hat,
            contrast_value: u_hat,
            p_value,
            leader,
            lagger,
        },
        entries,
    })
}

/// The lead-lag estimator: theta maximizing |U_n| over the grid, ties broken
/// toward smaller |theta| and then toward the positive lag.
pub fn lead_lag(
    x: &WeeklySeries,
    y: &WeeklySeries,
    cfg: &EarlyWarningConfig,
    seed: u64,
) -> Result<LagEstimate> {
    lead_lag_scan(x, y, cfg, seed).map(|s| s.estimate)
}

/// Outcome of the lead-lag-ratio rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LlrOutcome {
    pub chosen: LagEstimate,
    /// |U(theta+)| / |U(theta-)| when both sides were significant.
    pub ratio: Option<f64>,
}

/// When both a positive and a negative lag are significant, keeps the
/// stronger of the two shortest ones and reports their contrast ratio.
/// With only one significant side that estimate passes through unchanged.
pub fn lead_lag_ratio(
    x: &WeeklySeries,
    y: &WeeklySeries,
    cfg: &EarlyWarningConfig,
    seed: u64,
) -> Result<LlrOutcome> {
    let scan = lead_lag_scan(x, y, cfg, seed)?;
    llr_rule(&scan.entries, cfg.llag_thr, &x.id, &y.id)
}

/// The LLR selection rule over a contrast scan; factored out so the rule is
/// testable with hand-built scans.
pub fn llr_rule(
    entries: &[LagScanEntry],
    llag_thr: f64,
    x_id: &str,
    y_id: &str,
) -> Result<LlrOutcome> {
    let shortest = |positive: bool| -> Option<&LagScanEntry> {
        entries
            .iter()
            .filter(|e| if positive { e.theta > 0 } else { e.theta < 0 })
            .filter(|e| e.p_value < llag_thr)
            .min_by_key(|e| e.theta.abs())
    };
    let pos = shortest(true);
    let neg = shortest(false);
    let to_estimate = |e: &LagScanEntry| {
        let (leader, lagger) = if e.theta >= 0 {
            (x_id.to_string(), y_id.to_string())
        } else {
            (y_id.to_string(), x_id.to_string())
        };
        LagEstimate {
            theta_hat: e.theta,
            contrast_value: e.contrast,
            p_value: e.p_value,
            leader,
            lagger,
        }
    };
    match (pos, neg) {
        (Some(p), Some(n)) => {
            // Ties go to the positive lag.
            let chosen = if p.contrast.abs() >= n.contrast.abs() { p } else { n };
            Ok(LlrOutcome {
                chosen: to_estimate(chosen),
                ratio: Some(p.contrast.abs() / n.contrast.abs()),
            })
        }
        (Some(p), None) => Ok(LlrOutcome {
            chosen: to_estimate(p),
            ratio: None,
        }),
        (None, Some(n)) => Ok(LlrOutcome {
            chosen: to_estimate(n),
            ratio: None,
        }),
        (None, None) => Err(Error::NoSignificantLag),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_for, standard_normal};
    use crate::timeseries::WeekIndex;

    fn wk(y: i32, w: u32) -> WeekIndex {
        WeekIndex::new(y, w).unwrap()
    }

    fn noise_series(id: &str, n: usize, seed_label: &str) -> WeeklySeries {
        let mut rng = rng_for(31, &[seed_label]);
        WeeklySeries::new(
            id,
            None,
            wk(2017, 1),
            (0..n).map(|_| Some(standard_normal(&mut rng))).collect(),
        )
        .unwrap()
    }

    /// Y identical to X shifted by k weeks: X leads Y by k.
    fn shifted_copy(x: &WeeklySeries, k: i64) -> WeeklySeries {
        x.shift_weeks(k)
            .reindex(x.start(), x.end())
            .unwrap()
            .with_id("y")
    }

    #[test]
    fn recovers_planted_positive_lag() {
        let x = noise_series("x", 120, "ll-x");
        let y = shifted_copy(&x, 3);
        let cfg = EarlyWarningConfig::default();
        let est = lead_lag(&x, &y, &cfg, 99).unwrap();
        assert_eq!(est.theta_hat, 3);
        assert_eq!(est.leader, "x");
        assert_eq!(est.lagger, "y");
        assert!(est.p_value < cfg.llag_thr, "p = {}", est.p_value);
    }

    #[test]
    fn negative_lag_and_role_swap() {
        let x = noise_series("x", 120, "ll-swap");
        let y = shifted_copy(&x, 5);
        let cfg = EarlyWarningConfig::default();
        let forward = lead_lag(&x, &y, &cfg, 99).unwrap();
        let backward = lead_lag(&y, &x, &cfg, 99).unwrap();
        assert_eq!(forward.theta_hat, 5);
        assert_eq!(backward.theta_hat, -5);
        assert_eq!(backward.leader, "x");
    }

    #[test]
    fn identical_series_tie_break_at_zero() {
        let x = noise_series("x", 120, "ll-zero");
        let y = x.clone().with_id("y");
        let est = lead_lag(&x, &y, &EarlyWarningConfig::default(), 99).unwrap();
        assert_eq!(est.theta_hat, 0);
    }

    #[test]
    fn independent_noise_is_insignificant_mostly() {
        let cfg = EarlyWarningConfig::default();
        let mut significant = 0;
        for trial in 0..20 {
            let x = noise_series("x", 120, &format!("ll-ind-x{trial}"));
            let y = noise_series("y", 120, &format!("ll-ind-y{trial}"));
            let est = lead_lag(&x, &y, &cfg, trial as u64).unwrap();
            if est.p_value < cfg.llag_thr {
                significant += 1;
            }
        }
        assert!(significant <= 4, "{significant}/20 false positives");
    }

    #[test]
    fn too_short_for_permutations_errors() {
        let x = noise_series("x", 12, "ll-short-x");
        let y = noise_series("y", 12, "ll-short-y");
        assert!(lead_lag(&x, &y, &EarlyWarningConfig::default(), 1).is_err());
    }

    fn entry(theta: i64, contrast: f64, p: f64) -> LagScanEntry {
        LagScanEntry {
            theta,
            contrast,
            p_value: p,
        }
    }

    #[test]
    fn llr_one_side_passes_through() {
        let entries = vec![entry(-2, 0.4, 0.5), entry(1, 2.0, 0.01), entry(3, 2.5, 0.02)];
        let out = llr_rule(&entries, 0.05, "x", "y").unwrap();
        // Shortest significant positive lag is 1; no significant negative.
        assert_eq!(out.chosen.theta_hat, 1);
        assert!(out.ratio.is_none());
    }

    #[test]
    fn llr_picks_stronger_of_two_shortest() {
        let entries = vec![entry(-1, 1.0, 0.01), entry(2, -2.0, 0.01)];
        let out = llr_rule(&entries, 0.05, "x", "y").unwrap();
        assert_eq!(out.chosen.theta_hat, 2);
        assert!((out.ratio.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn llr_tie_goes_positive() {
        let entries = vec![entry(-1, -1.5, 0.01), entry(1, 1.5, 0.01)];
        let out = llr_rule(&entries, 0.05, "x", "y").unwrap();
        assert_eq!(out.chosen.theta_hat, 1);
        assert_eq!(out.chosen.leader, "x");
        assert!((out.ratio.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn llr_nothing_significant_errors() {
        let entries = vec![entry(-1, 1.0, 0.5), entry(1, 1.0, 0.4)];
        assert!(matches!(
            llr_rule(&entries, 0.05, "x", "y"),
            Err(Error::NoSignificantLag)
        ));
    }
}
