use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::timeseries::week::WeekIndex;

/// A named, week-indexed numeric series. Index `i` holds the value for
/// `start + i` weeks; `None` marks a missing observation.
#[derive(Debug, Clone, PartialEq)]
pub struct WeeklySeries {
    pub id: String,
    pub origin: Option<String>,
    start: WeekIndex,
    values: Vec<Option<f64>>,
}

impl WeeklySeries {
    pub fn new(
        id: impl Into<String>,
        origin: Option<String>,
        start: WeekIndex,
        values: Vec<Option<f64>>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(WeeklySeries {
            id: id.into(),
            origin,
            start,
            values,
        })
    }

    pub fn start(&self) -> WeekIndex {
        self.start
    }

    /// Last week covered by the series (inclusive).
    pub fn end(&self) -> WeekIndex {
        self.start.plus_weeks(self.values.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn week_at(&self, idx: usize) -> WeekIndex {
        self.start.plus_weeks(idx as i64)
    }

    pub fn value_at(&self, idx: usize) -> Option<f64> {
        self.values.get(idx).copied().flatten()
    }

    /// Value for a calendar week, `None` when outside the range or missing.
    pub fn get(&self, week: WeekIndex) -> Option<f64> {
        let offset = self.start.weeks_until(week);
        if offset < 0 {
            return None;
        }
        self.value_at(offset as usize)
    }

    pub fn weeks(&self) -> impl Iterator<Item = WeekIndex> + '_ {
        (0..self.values.len()).map(|i| self.week_at(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (WeekIndex, Option<f64>)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (self.week_at(i), *v))
    }

    /// (position, value) pairs of the non-missing observations, in order.
    pub fn observations(&self) -> Vec<(usize, f64)> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|x| (i, x)))
            .collect()
    }

    pub fn count_non_missing(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn missing_fraction(&self) -> f64 {
        1.0 - self.count_non_missing() as f64 / self.values.len() as f64
    }

    /// Re-indexes onto `[start, end]`, padding with missing outside the
    /// current range.
    pub fn reindex(&self, start: WeekIndex, end: WeekIndex) -> Result<Self> {
        if end < start {
            return Err(Error::EmptyRange);
        }
        let n = start.weeks_until(end) + 1;
        let values = (0..n)
            .map(|i| self.get(start.plus_weeks(i)))
            .collect::<Vec<_>>();
        WeeklySeries::new(self.id.clone(), self.origin.clone(), start, values)
    }

    /// The trailing sub-series of up to `n` weeks ending at the series end.
    pub fn tail(&self, n: usize) -> Self {
        let skip = self.values.len().saturating_sub(n);
        WeeklySeries {
            id: self.id.clone(),
            origin: self.origin.clone(),
            start: self.start.plus_weeks(skip as i64),
            values: self.values[skip..].to_vec(),
        }
    }

    /// Truncates to weeks `<= cutoff`; `None` if nothing remains.
    pub fn truncate_at(&self, cutoff: WeekIndex) -> Option<Self> {
        let keep = self.start.weeks_until(cutoff) + 1;
        if keep <= 0 {
            return None;
        }
        let keep = (keep as usize).min(self.values.len());
        Some(WeeklySeries {
            id: self.id.clone(),
            origin: self.origin.clone(),
            start: self.start,
            values: self.values[..keep].to_vec(),
        })
    }

    /// Shifts the whole series in time: the value observed at week w moves
    /// to week w + `weeks`. Values are untouched; only the index moves.
    pub fn shift_weeks(&self, weeks: i64) -> Self {
        WeeklySeries {
            id: self.id.clone(),
            origin: self.origin.clone(),
            start: self.start.plus_weeks(weeks),
            values: self.values.clone(),
        }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

/// A month-indexed series; month arithmetic is calendar-correct.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlySeries {
    pub id: String,
    start_year: i32,
    start_month: u32,
    values: Vec<Option<f64>>,
}

impl MonthlySeries {
    pub fn new(
        id: impl Into<String>,
        start_year: i32,
        start_month: u32,
        values: Vec<Option<f64>>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if !(1..=12).contains(&start_month) {
            return Err(Error::InvalidMonth(format!("{start_year}-{start_month:02}")));
        }
        Ok(MonthlySeries {
            id: id.into(),
            start_year,
            start_month,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn start(&self) -> (i32, u32) {
        (self.start_year, self.start_month)
    }

    /// (year, month) of entry `idx`.
    pub fn month_at(&self, idx: usize) -> (i32, u32) {
        let total = self.start_year as i64 * 12 + (self.start_month as i64 - 1) + idx as i64;
        (
            total.div_euclid(12) as i32,
            (total.rem_euclid(12) + 1) as u32,
        )
    }

    /// First day of the month holding entry `idx`.
    pub fn first_day_at(&self, idx: usize) -> NaiveDate {
        let (y, m) = self.month_at(idx);
        NaiveDate::from_ymd_opt(y, m, 1).expect("valid month")
    }

    /// Last day of the month holding entry `idx`.
    pub fn last_day_at(&self, idx: usize) -> NaiveDate {
        let (y, m) = self.month_at(idx);
        let next = if m == 12 {
            NaiveDate::from_ymd_opt(y + 1, 1, 1)
        } else {
            NaiveDate::from_ymd_opt(y, m + 1, 1)
        };
        next.expect("valid month").pred_opt().expect("valid date")
    }

    /// The week containing the 15th of the month holding entry `idx`:
    /// the anchor week for weekly interpolation.
    pub fn anchor_week_at(&self, idx: usize) -> WeekIndex {
        let (y, m) = self.month_at(idx);
        WeekIndex::from_date(NaiveDate::from_ymd_opt(y, m, 15).expect("valid month"))
    }
}

/// Parses "2017-05" into (year, month).
pub fn parse_month(s: &str) -> Result<(i32, u32)> {
    let (y, m) = s
        .split_once('-')
        .ok_or_else(|| Error::InvalidMonth(s.to_string()))?;
    let year: i32 = y.parse().map_err(|_| Error::InvalidMonth(s.to_string()))?;
    let month: u32 = m.parse().map_err(|_| Error::InvalidMonth(s.to_string()))?;
    if !(1..=12).contains(&month) {
        return Err(Error::InvalidMonth(s.to_string()));
    }
    Ok((year, month))
}

/// Parses an ISO calendar date.
pub fn parse_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| Error::InvalidDate(s.to_string()))
}

/// Formats (year, month) as "2017-05".
pub fn format_month(year: i32, month: u32) -> String {
    format!("{year}-{month:02}")
}

/// Rounded week count for a span given in months, using the mean Gregorian
/// ratio 52 weeks per 12 months. 6 months -> 26 weeks, 12 -> 52, 24 -> 104.
pub fn months_to_weeks(months: u32) -> usize {
    ((months as f64 * 52.0 / 12.0).round()) as usize
}

#[allow(unused)]
fn _assert_traits() {
    fn is_send_sync<T: Send + Sync>() {}
    is_send_sync::<WeeklySeries>();
    is_send_sync::<MonthlySeries>();
}
