//! Confidence bands around the trailing moving average: center +/- 2
//! standard errors, where the standard error is the trailing sample sd of
//! the (value - moving average) residuals divided by sqrt(window).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{moving_average, WeekIndex, WeeklySeries};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BandPoint {
    pub center: f64,
    pub lower: f64,
    pub upper: f64,
}

/// One entry per week of the input; `None` until a full window of residuals
/// is available or where data is missing.
pub fn confidence_band(
    target: &WeeklySeries,
    window: usize,
) -> Result<Vec<(WeekIndex, Option<BandPoint>)>> {
    if window < 4 {
        return Err(Error::InvalidWindow);
    }
    let ma = moving_average(target, window)?;
    let residuals: Vec<Option<f64>> = target
        .values()
        .iter()
        .zip(ma.values())
        .map(|(v, m)| match (v, m) {
            (Some(v), Some(m)) => Some(v - m),
            _ => None,
        })
        .collect();
    let out = (0..target.len())
        .map(|i| {
            let week = target.week_at(i);
            if i + 1 < window {
                return (week, None);
            }
            let center = match ma.value_at(i) {
                Some(c) => c,
                None => return (week, None),
            };
            let in_window: Vec<f64> = residuals[i + 1 - window..=i]
                .iter()
                .filter_map(|r| *r)
                .collect();
            if in_window.len() < 2 {
                return (week, None);
            }
            let sd = crate::timeseries::stats::sample_sd(&in_window);
            let half = 2.0 * sd / (window as f64).sqrt();
            (
                week,
                Some(BandPoint {
                    center,
                    lower: center - half,
                    upper: center + half,
                }),
            )
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_for, standard_normal};

    fn wk(y: i32, w: u32) -> WeekIndex {
        WeekIndex::new(y, w).unwrap()
    }

    #[test]
    fn constant_series_gives_zero_width_band() {
        let s = WeeklySeries::new("s", None, wk(2017, 1), vec![Some(25.0); 30]).unwrap();
        let band = confidence_band(&s, 8).unwrap();
        for (_, b) in band.iter().skip(7) {
            let b = b.unwrap();
            assert_eq!(b.center, 25.0);
            assert_eq!(b.lower, 25.0);
            assert_eq!(b.upper, 25.0);
        }
        assert!(band[0].1.is_none());
    }

    #[test]
    fn band_center_is_the_moving_average() {
        let mut rng = rng_for(157, &["band-ma"]);
        let s = WeeklySeries::new(
            "s",
            None,
            wk(2017, 1),
            (0..60).map(|_| Some(50.0 + standard_normal(&mut rng))).collect(),
        )
        .unwrap();
        let window = 12;
        let ma = moving_average(&s, window).unwrap();
        for (i, (_, b)) in confidence_band(&s, window).unwrap().iter().enumerate() {
            if let Some(b) = b {
                assert_eq!(b.center, ma.value_at(i).unwrap());
                assert!(b.lower <= b.center && b.center <= b.upper);
            }
        }
    }

    #[test]
    fn iid_noise_coverage_near_95_pct() {
        // The MA of iid noise has sd sigma/sqrt(w); the band half-width
        // estimates 2 sigma/sqrt(w), so coverage of the true mean should
        // land near 95%.
        let window = 16;
        let mut covered = 0usize;
        let mut total = 0usize;
        for trial in 0..40 {
            let mut rng = rng_for(163, &["band-cov", &trial.to_string()]);
            let s = WeeklySeries::new(
                "s",
                None,
                wk(2017, 1),
                (0..400).map(|_| Some(10.0 + 3.0 * standard_normal(&mut rng))).collect(),
            )
            .unwrap();
            for (_, b) in confidence_band(&s, window).unwrap().iter().flat_map(|(w, b)| {
                b.map(|b| (w, b))
            }) {
                total += 1;
                if b.lower <= 10.0 && 10.0 <= b.upper {
                    covered += 1;
                }
            }
        }
        let coverage = covered as f64 / total as f64;
        assert!(
            (0.90..=0.99).contains(&coverage),
            "coverage {coverage} over {total} points"
        );
    }

    #[test]
    fn tiny_window_rejected() {
        let s = WeeklySeries::new("s", None, wk(2017, 1), vec![Some(1.0); 10]).unwrap();
        assert!(confidence_band(&s, 3).is_err());
    }
}
