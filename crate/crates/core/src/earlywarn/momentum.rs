//! Momentum (acceleration) signals: the ratio of a short to a long trailing
//! moving average, fired when it leaves the band [1/ma_thr, ma_thr].

use crate::earlywarn::config::EarlyWarningConfig;
use crate::error::{Error, Result};
use crate::timeseries::{moving_average, WeekIndex, WeeklySeries};

/// Weeks where the MA ratio crossed the two-sided threshold, with the ratio
/// observed there. The ratio is only evaluated once the long window is fully
/// inside the series, and never when the long MA is missing or non-positive.
pub fn momentum_signal(
    s: &WeeklySeries,
    cfg: &EarlyWarningConfig,
) -> Result<Vec<(WeekIndex, f64)>> {
    if s.count_non_missing() < cfg.ma2 {
        return Err(Error::InsufficientData(format!(
            "momentum on '{}' needs >= {} observations, got {}",
            s.id,
            cfg.ma2,
            s.count_non_missing()
        )));
    }
    let short = moving_average(s, cfg.ma1)?;
    let long = moving_average(s, cfg.ma2)?;
    let mut fired = Vec::new();
    for i in (cfg.ma2 - 1)..s.len() {
        let (Some(num), Some(den)) = (short.value_at(i), long.value_at(i)) else {
            continue;
        };
        if den <= 0.0 {
            continue;
        }
        let ratio = num / den;
        if ratio > cfg.ma_thr || ratio < 1.0 / cfg.ma_thr {
            fired.push((s.week_at(i), ratio));
        }
    }
    Ok(fired)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wk(y: i32, w: u32) -> WeekIndex {
        WeekIndex::new(y, w).unwrap()
    }

    fn series(values: Vec<f64>) -> WeeklySeries {
        WeeklySeries::new("s", None, wk(2017, 1), values.into_iter().map(Some).collect()).unwrap()
    }

    #[test]
    fn constant_series_never_fires() {
        let s = series(vec![10.0; 60]);
        let fired = momentum_signal(&s, &EarlyWarningConfig::default()).unwrap();
        assert!(fired.is_empty());
    }

    #[test]
    fn upward_jump_fires_quickly() {
        let cfg = EarlyWarningConfig::default();
        let mut values = vec![10.0; 40];
        values.extend(vec![30.0; 20]);
        let s = series(values);
        let fired = momentum_signal(&s, &cfg).unwrap();
        assert!(!fired.is_empty());
        // Short MA saturates within ma1 weeks of the jump at index 40.
        let first = s.start().weeks_until(fired[0].0) as usize;
        assert!(first >= 40 && first <= 40 + cfg.ma1, "first firing at {first}");
        assert!(fired[0].1 > cfg.ma_thr);
    }

    #[test]
    fn decay_fires_downward() {
        let cfg = EarlyWarningConfig::default();
        let mut values = vec![30.0; 40];
        values.extend(vec![10.0; 20]);
        let s = series(values);
        let fired = momentum_signal(&s, &cfg).unwrap();
        assert!(!fired.is_empty());
        assert!(fired.iter().all(|(_, r)| *r < 1.0 / cfg.ma_thr));
    }

    #[test]
    fn short_series_errors() {
        let s = series(vec![1.0; 10]);
        assert!(momentum_signal(&s, &EarlyWarningConfig::default()).is_err());
    }

    #[test]
    fn nonpositive_long_ma_gives_no_signal() {
        let mut values = vec![0.0; 40];
        values.extend(vec![5.0; 5]);
        values.extend(vec![0.0; 15]);
        let s = series(values);
        let fired = momentum_signal(&s, &EarlyWarningConfig::default()).unwrap();
        // Ratio is only defined where the long MA is positive; firings there
        // are legitimate, but weeks with a zero long MA must be absent.
        for (w, _) in &fired {
            let i = s.start().weeks_until(*w) as usize;
            let long = moving_average(&s, 24).unwrap();
            assert!(long.value_at(i).unwrap() > 0.0);
        }
    }
}
