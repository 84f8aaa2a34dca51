//! Frequency alignment and basic statistics on weekly series.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::timeseries::series::{MonthlySeries, WeeklySeries};
use crate::timeseries::stats;
use crate::timeseries::week::WeekIndex;

/// Sums daily observations into their ISO weeks. Duplicate dates are summed;
/// weeks inside the span with no observations are missing.
pub fn aggregate_daily_to_weekly(
    id: impl Into<String>,
    origin: Option<String>,
    daily: &[(NaiveDate, f64)],
) -> Result<WeeklySeries> {
    if daily.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut by_week: BTreeMap<WeekIndex, f64> = BTreeMap::new();
    for (date, value) in daily {
        *by_week.entry(WeekIndex::from_date(*date)).or_insert(0.0) += value;
    }
    let start = *by_week.keys().next().expect("nonempty");
    let end = *by_week.keys().next_back().expect("nonempty");
    let values = start
        .range_through(end)
        .map(|w| by_week.get(&w).copied())
        .collect();
    WeeklySeries::new(id, origin, start, values)
}

/// Turns a monthly series into a weekly one by linear interpolation.
///
/// Each non-missing monthly value is anchored at the week containing the
/// 15th of its month; weeks between anchors interpolate linearly, and weeks
/// outside the anchors hold the nearest anchor value. The output spans the
/// week containing the first month's first day through the week containing
/// the last month's last day.
pub fn interpolate_monthly_to_weekly(m: &MonthlySeries) -> Result<WeeklySeries> {
    let anchors: Vec<(WeekIndex, f64)> = m
        .values()
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|x| (m.anchor_week_at(i), x)))
        .collect();
    if anchors.len() < 2 {
        return Err(Error::InsufficientAnchors);
    }
    let start = WeekIndex::from_date(m.first_day_at(0));
    let end = WeekIndex::from_date(m.last_day_at(m.len() - 1));
    let values = start
        .range_through(end)
        .map(|w| Some(interp_at(&anchors, w)))
        .collect();
    WeeklySeries::new(m.id.clone(), None, start, values)
}

fn interp_at(anchors: &[(WeekIndex, f64)], w: WeekIndex) -> f64 {
    let (first, last) = (anchors[0], anchors[anchors.len() - 1]);
    if w <= first.0 {
        return first.1;
    }
    if w >= last.0 {
        return last.1;
    }
    let right = anchors.partition_point(|(a, _)| *a < w);
    let (w0, v0) = anchors[right - 1];
    let (w1, v1) = anchors[right];
    if w0 == w {
        return v0;
    }
    let span = w0.weeks_until(w1) as f64;
    let t = w0.weeks_until(w) as f64 / span;
    v0 + t * (v1 - v0)
}

/// Trailing moving average over the last `window_weeks` positions: the mean
/// of the non-missing values inside the window, missing when the window has
/// none. Windows at the head of the series are shorter.
pub fn moving_average(s: &WeeklySeries, window_weeks: usize) -> Result<WeeklySeries> {
    if window_weeks < 1 {
        return Err(Error::InvalidWindow);
    }
    let values = s.values();
    let out = (0..values.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(window_weeks);
            let in_window: Vec<f64> = values[lo..=i].iter().filter_map(|v| *v).collect();
            if in_window.is_empty() {
                None
            } else {
                Some(stats::mean(&in_window))
            }
        })
        .collect();
    WeeklySeries::new(s.id.clone(), s.origin.clone(), s.start(), out)
}

/// Coefficient of variation: sample standard deviation over |mean|.
pub fn coefficient_of_variation(s: &WeeklySeries) -> Result<f64> {
    let xs = stats::present(s.values());
    if xs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "cv of '{}' needs at least 2 values, got {}",
            s.id,
            xs.len()
        )));
    }
    let m = stats::mean(&xs);
    if m == 0.0 {
        return Err(Error::UndefinedCv);
    }
    Ok(stats::sample_sd(&xs) / m.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use chrono::Duration;
    use proptest::prelude::*;

    fn wk(y: i32, w: u32) -> WeekIndex {
        WeekIndex::new(y, w).unwrap()
    }

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    #[test]
    fn weekly_sum_of_constant_week() {
        // 2018-01-01 is a Monday: seven days of 1 inside one ISO week.
        let days: Vec<(NaiveDate, f64)> = (0..7)
            .map(|i| (date("2018-01-01") + Duration::days(i), 1.0))
            .collect();
        let s = aggregate_daily_to_weekly("e", None, &days).unwrap();
        assert_eq!(s.len(), 1);
        assert_abs_diff_eq!(s.value_at(0).unwrap(), 7.0);
    }

    #[test]
    fn weekly_sum_mon_and_sun() {
        let days = vec![(date("2018-01-01"), 2.0), (date("2018-01-07"), 3.0)];
        let s = aggregate_daily_to_weekly("e", None, &days).unwrap();
        assert_eq!(s.len(), 1);
        assert_abs_diff_eq!(s.value_at(0).unwrap(), 5.0);
    }

    #[test]
    fn two_full_weeks() {
        let days: Vec<(NaiveDate, f64)> = (0..14)
            .map(|i| (date("2018-01-01") + Duration::days(i), 1.0))
            .collect();
        let s = aggregate_daily_to_weekly("e", None, &days).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.values(), &[Some(7.0), Some(7.0)]);
    }

    #[test]
    fn gap_weeks_are_missing_and_duplicates_sum() {
        let days = vec![
            (date("2018-01-01"), 1.0),
            (date("2018-01-01"), 1.0),
            (date("2018-01-15"), 4.0),
        ];
        let s = aggregate_daily_to_weekly("e", None, &days).unwrap();
        assert_eq!(s.values(), &[Some(2.0), None, Some(4.0)]);
        assert!(aggregate_daily_to_weekly("e", None, &[]).is_err());
    }

    #[test]
    fn interpolation_reproduces_anchors() {
        let m = MonthlySeries::new("m", 2018, 1, vec![Some(100.0), Some(40.0), Some(40.0)]).unwrap();
        let w = interpolate_monthly_to_weekly(&m).unwrap();
        for i in 0..3 {
            let anchor = m.anchor_week_at(i);
            assert_abs_diff_eq!(w.get(anchor).unwrap(), m.values()[i].unwrap(), epsilon = 1e-12);
        }
        // Independent check of the line between the first two anchors.
        let a0 = m.anchor_week_at(0);
        let a1 = m.anchor_week_at(1);
        let span = a0.weeks_until(a1) as f64;
        for k in 0..=a0.weeks_until(a1) {
            let expect = 100.0 + (k as f64 / span) * (40.0 - 100.0);
            assert_abs_diff_eq!(w.get(a0.plus_weeks(k)).unwrap(), expect, epsilon = 1e-12);
        }
        // Flat extension on both sides.
        assert_abs_diff_eq!(w.value_at(0).unwrap(), 100.0);
        assert_abs_diff_eq!(w.get(w.end()).unwrap(), 40.0);
    }

    #[test]
    fn interpolation_constant_and_linear() {
        let m = MonthlySeries::new("m", 2018, 3, vec![Some(10.0), Some(10.0)]).unwrap();
        let w = interpolate_monthly_to_weekly(&m).unwrap();
        for v in w.values() {
            assert_abs_diff_eq!(v.unwrap(), 10.0, epsilon = 1e-12);
        }
        // Skips missing months when collecting anchors.
        let m = MonthlySeries::new("m", 2018, 1, vec![Some(0.0), None, Some(8.0)]).unwrap();
        let w = interpolate_monthly_to_weekly(&m).unwrap();
        let a0 = m.anchor_week_at(0);
        let a2 = m.anchor_week_at(2);
        let mid = a0.plus_weeks(a0.weeks_until(a2) / 2);
        let expect = 8.0 * (a0.weeks_until(mid) as f64 / a0.weeks_until(a2) as f64);
        assert_abs_diff_eq!(w.get(mid).unwrap(), expect, epsilon = 1e-12);
        assert!(matches!(
            interpolate_monthly_to_weekly(
                &MonthlySeries::new("m", 2018, 1, vec![Some(1.0), None]).unwrap()
            ),
            Err(Error::InsufficientAnchors)
        ));
    }

    #[test]
    fn moving_average_hand_example() {
        let s = WeeklySeries::new(
            "s",
            None,
            wk(2018, 1),
            vec![Some(1.0), Some(2.0), Some(3.0), Some(4.0)],
        )
        .unwrap();
        let ma = moving_average(&s, 2).unwrap();
        let got: Vec<f64> = ma.values().iter().map(|v| v.unwrap()).collect();
        assert_eq!(got, vec![1.0, 1.5, 2.5, 3.5]);
        assert!(moving_average(&s, 0).is_err());
    }

    #[test]
    fn moving_average_missing_handling() {
        let s = WeeklySeries::new("s", None, wk(2018, 1), vec![None, None, None]).unwrap();
        let ma = moving_average(&s, 2).unwrap();
        assert!(ma.values().iter().all(|v| v.is_none()));
        let s = WeeklySeries::new("s", None, wk(2018, 1), vec![Some(2.0), None, Some(4.0)]).unwrap();
        let ma = moving_average(&s, 2).unwrap();
        assert_eq!(ma.values(), &[Some(2.0), Some(2.0), Some(4.0)]);
    }

    #[test]
    fn cv_hand_example_and_errors() {
        let s = WeeklySeries::new("s", None, wk(2018, 1), vec![Some(1.0), Some(3.0)]).unwrap();
        assert_abs_diff_eq!(
            coefficient_of_variation(&s).unwrap(),
            2f64.sqrt() / 2.0,
            epsilon = 1e-12
        );
        let zero = WeeklySeries::new("s", None, wk(2018, 1), vec![Some(-1.0), Some(1.0)]).unwrap();
        assert!(matches!(coefficient_of_variation(&zero), Err(Error::UndefinedCv)));
        let one = WeeklySeries::new("s", None, wk(2018, 1), vec![Some(1.0), None]).unwrap();
        assert!(coefficient_of_variation(&one).is_err());
    }

    proptest! {
        #[test]
        fn ma_window_one_is_identity(values in proptest::collection::vec(
            proptest::option::of(-1e6f64..1e6), 1..40)) {
            let s = WeeklySeries::new("s", None, wk(2018, 1), values.clone()).unwrap();
            let ma = moving_average(&s, 1).unwrap();
            for (a, b) in s.values().iter().zip(ma.values()) {
                match (a, b) {
                    (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-12),
                    (None, None) => {}
                    _ => prop_assert!(false, "missingness changed"),
                }
            }
        }

        #[test]
        fn cv_scale_and_sign_invariant(
            values in proptest::collection::vec(1.0f64..1e3, 3..30),
            k in 0.01f64..100.0,
        ) {
            let base: Vec<Option<f64>> = values.iter().map(|v| Some(*v)).collect();
            let s = WeeklySeries::new("s", None, wk(2018, 1), base.clone()).unwrap();
            let cv = coefficient_of_variation(&s);
            prop_assume!(cv.is_ok());
            let cv = cv.unwrap();
            let scaled = WeeklySeries::new(
                "s", None, wk(2018, 1),
                base.iter().map(|v| v.map(|x| x * k)).collect(),
            ).unwrap();
            prop_assert!((coefficient_of_variation(&scaled).unwrap() - cv).abs() < 1e-9 * (1.0 + cv));
            let flipped = WeeklySeries::new(
                "s", None, wk(2018, 1),
                base.iter().map(|v| v.map(|x| -x)).collect(),
            ).unwrap();
            prop_assert!((coefficient_of_variation(&flipped).unwrap() - cv).abs() < 1e-9 * (1.0 + cv));
        }

        #[test]
        fn constant_series_ma_is_constant(c in -1e3f64..1e3, w in 1usize..10, n in 1usize..30) {
            let s = WeeklySeries::new("s", None, wk(2018, 1), vec![Some(c); n]).unwrap();
            let ma = moving_average(&s, w).unwrap();
            for v in ma.values() {
                prop_assert!((v.unwrap() - c).abs() < 1e-9);
            }
        }
    }
}
