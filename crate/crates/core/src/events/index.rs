use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::events::table::{Category, EventWeightTable, Lookup};
use crate::timeseries::{WeekIndex, WeeklySeries};

/// One raw event mention. `source_key` identifies the underlying unique
/// event; the same event reported by many outlets shares the key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub date: NaiveDate,
    pub country: String,
    pub code: String,
    pub is_root: bool,
    pub source_key: String,
}

/// The five weekly macro-category indices for one country.
#[derive(Debug, Clone)]
pub struct CountryIndices {
    pub country: String,
    series: [WeeklySeries; 5],
}

impl CountryIndices {
    pub fn get(&self, category: Category) -> &WeeklySeries {
        let pos = Category::ALL.iter().position(|c| *c == category).unwrap();
        &self.series[pos]
    }

    pub fn series(&self) -> &[WeeklySeries; 5] {
        &self.series
    }
}

/// Per-country index bundles plus diagnostics from the run that built them.
#[derive(Debug, Clone)]
pub struct EventIndexSet {
    countries: BTreeMap<String, CountryIndices>,
    pub diagnostics: Vec<String>,
}

impl EventIndexSet {
    pub fn country(&self, country: &str) -> Option<&CountryIndices> {
        self.countries.get(country)
    }

    pub fn countries(&self) -> impl Iterator<Item = &CountryIndices> {
        self.countries.values()
    }

    pub fn len(&self) -> usize {
        self.countries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.countries.is_empty()
    }
}

/// Keeps exactly one record per distinct `source_key`: non-root records are
/// removed first, then the earliest record per key survives (first-seen wins
/// among equal dates).
pub fn dedupe_events(records: &[EventRecord]) -> Vec<EventRecord> {
    let mut best: BTreeMap<&str, &EventRecord> = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_root) {
        match best.get(r.source_key.as_str()) {
            Some(b) if b.date <= r.date => {}
            _ => {
                best.insert(&r.source_key, r);
            }
        }
    }
    // Preserve input order of the winners.
    records
        .iter()
        .filter(|r| {
            best.get(r.source_key.as_str())
                .is_some_and(|b| std::ptr::eq(*b, *r))
        })
        .cloned()
        .collect()
}

/// Sums signed, strength-scaled weights per country, ISO week, and
/// macro-category. Weeks with no events are 0, not missing: a quiet week is
/// a real observation for push factors. Unknown codes produce a diagnostic
/// and are skipped.
pub fn compute_indices(
    records: &[EventRecord],
    table: &EventWeightTable,
    range: (WeekIndex, WeekIndex),
) -> Result<EventIndexSet> {
    let (start, end) = range;
    if end < start {
        return Err(Error::EmptyRange);
    }
    let n_weeks = (start.weeks_until(end) + 1) as usize;
    let mut sums: BTreeMap<String, [Vec<f64>; 5]> = BTreeMap::new();
    let mut diagnostics = Vec::new();

    for r in records {
        let week = WeekIndex::from_date(r.date);
        if week < start || week > end {
            continue;
        }
        // Any in-range record registers its country, so a country whose
        // events are all excluded still gets all-zero indices.
        let entry = sums
            .entry(r.country.clone())
            .or_insert_with(|| std::array::from_fn(|_| vec![0.0; n_weeks]));
        let weight = match table.lookup(&r.code) {
            Lookup::Included(w) => w,
            Lookup::Excluded => continue,
            Lookup::Unknown => {
                diagnostics.push(format!(
                    "warning: unknown event code '{}' ({} {}), skipped",
                    r.code, r.country, r.date
                ));
                continue;
            }
        };
        let idx = start.weeks_until(week) as usize;
        let cat = Category::ALL
            .iter()
            .position(|c| *c == weight.category)
            .unwrap();
        entry[cat][idx] += weight.weight();
    }

    let countries = sums
        .into_iter()
        .map(|(country, cats)| {
            let series = std::array::from_fn(|i| {
                WeeklySeries::new(
                    Category::ALL[i].index_name(),
                    Some(country.clone()),
                    start,
                    cats[i].iter().map(|v| Some(*v)).collect(),
                )
                .expect("n_weeks >= 1")
            });
            (country.clone(), CountryIndices { country, series })
        })
        .collect();

    Ok(EventIndexSet {
        countries,
        diagnostics,
    })
}

/// The composite Push Factor Index: per-week sum of the five
/// macro-category indices.
pub fn push_factor_index(idx: &CountryIndices) -> WeeklySeries {
    let n = idx.series[0].len();
    let values = (0..n)
        .map(|i| {
            Some(
                idx.series
                    .iter()
                    .map(|s| s.value_at(i).unwrap_or(0.0))
                    .sum::<f64>(),
            )
        })
        .collect();
    WeeklySeries::new(
        "PFI",
        Some(idx.country.clone()),
        idx.series[0].start(),
        values,
    )
    .expect("nonempty")
}
