use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One ISO-8601 week: the atomic time unit of every weekly series.
///
/// Ordering by (iso_year, iso_week) is chronological, and the successor of
/// week 52/53 is week 1 of the next ISO year. Any calendar date maps to
/// exactly one `WeekIndex`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeekIndex {
    iso_year: i32,
    iso_week: u8,
}

impl WeekIndex {
    pub fn new(iso_year: i32, iso_week: u32) -> Result<Self> {
        NaiveDate::from_isoywd_opt(iso_year, iso_week, Weekday::Mon)
            .map(|_| WeekIndex {
                iso_year,
                iso_week: iso_week as u8,
            })
            .ok_or_else(|| Error::InvalidWeek(format!("{iso_year}-W{iso_week:02}")))
    }

    pub fn from_date(date: NaiveDate) -> Self {
        let iso = date.iso_week();
        WeekIndex {
            iso_year: iso.year(),
            iso_week: iso.week() as u8,
        }
    }

    pub fn iso_year(&self) -> i32 {
        self.iso_year
    }

    pub fn iso_week(&self) -> u32 {
        u32::from(self.iso_week)
    }

    /// Monday of this week; the canonical anchor date for arithmetic.
    pub fn monday(&self) -> NaiveDate {
        NaiveDate::from_isoywd_opt(self.iso_year, u32::from(self.iso_week), Weekday::Mon)
            .expect("validated on construction")
    }

    pub fn plus_weeks(&self, weeks: i64) -> Self {
        Self::from_date(self.monday() + Duration::weeks(weeks))
    }

    pub fn next(&self) -> Self {
        self.plus_weeks(1)
    }

    /// Signed number of weeks from `self` to `other`.
    pub fn weeks_until(&self, other: WeekIndex) -> i64 {
        (other.monday() - self.monday()).num_days() / 7
    }

    /// Absolute week number on a fixed global axis (weeks since the common
    /// era, floored). Differences equal `weeks_until`.
    pub fn epoch_week(&self) -> i64 {
        i64::from(self.monday().num_days_from_ce()).div_euclid(7)
    }

    /// Inclusive range of weeks from `self` through `end`.
    pub fn range_through(&self, end: WeekIndex) -> impl Iterator<Item = WeekIndex> {
        let start = *self;
        let n = if end < start {
            0
        } else {
            start.weeks_until(end) + 1
        };
        (0..n).map(move |i| start.plus_weeks(i))
    }
}

impl fmt::Display for WeekIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-W{:02}", self.iso_year, self.iso_week)
    }
}

impl FromStr for WeekIndex {
    type Err = Error;

    /// Parses "2017-W05". Also accepts a plain ISO date, which maps to the
    /// week containing it.
    fn from_str(s: &str) -> Result<Self> {
        if let Some((y, w)) = s.split_once("-W") {
            let year: i32 = y.parse().map_err(|_| Error::InvalidWeek(s.to_string()))?;
            let week: u32 = w.parse().map_err(|_| Error::InvalidWeek(s.to_string()))?;
            return WeekIndex::new(year, week);
        }
        let date =
            NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| Error::InvalidWeek(s.to_string()))?;
        Ok(WeekIndex::from_date(date))
    }
}

impl Serialize for WeekIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WeekIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}
