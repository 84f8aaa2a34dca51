use crate::error::{Error, Result};
use crate::timeseries::series::WeeklySeries;
use crate::timeseries::week::WeekIndex;

/// How `align` chooses the common week range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignRange {
    /// Union of all series ranges (the default).
    Union,
    /// Intersection of all series ranges; errors when empty.
    Intersection,
    /// An explicit inclusive span.
    Explicit(WeekIndex, WeekIndex),
}

/// A collection of weekly series sharing one aligned week range, with one
/// member designated as the dependent (target) series.
#[derive(Debug, Clone)]
pub struct Panel {
    series: Vec<WeeklySeries>,
    target_id: String,
}

impl Panel {
    /// Builds a panel from already-aligned series. Checks the shared-range
    /// invariant and that the target exists.
    pub fn new(series: Vec<WeeklySeries>, target_id: impl Into<String>) -> Result<Self> {
        let target_id = target_id.into();
        if series.is_empty() {
            return Err(Error::EmptyPanel);
        }
        let (start, end) = (series[0].start(), series[0].end());
        for s in &series {
            if s.start() != start || s.end() != end {
                return Err(Error::InsufficientData(format!(
                    "series '{}' spans {}..{}, expected {}..{}",
                    s.id,
                    s.start(),
                    s.end(),
                    start,
                    end
                )));
            }
        }
        if !series.iter().any(|s| s.id == target_id) {
            return Err(Error::SeriesNotFound(target_id));
        }
        Ok(Panel { series, target_id })
    }

    pub fn series(&self) -> &[WeeklySeries] {
        &self.series
    }

    pub fn target_id(&self) -> &str {
        &self.target_id
    }

    pub fn target(&self) -> &WeeklySeries {
        self.get(&self.target_id).expect("validated on construction")
    }

    pub fn get(&self, id: &str) -> Option<&WeeklySeries> {
        self.series.iter().find(|s| s.id == id)
    }

    /// All members except the target.
    pub fn covariates(&self) -> impl Iterator<Item = &WeeklySeries> {
        self.series.iter().filter(move |s| s.id != self.target_id)
    }

    pub fn start(&self) -> WeekIndex {
        self.series[0].start()
    }

    pub fn end(&self) -> WeekIndex {
        self.series[0].end()
    }

    pub fn n_weeks(&self) -> usize {
        self.series[0].len()
    }

    /// Replaces the member set, keeping the target id.
    pub fn with_series(&self, series: Vec<WeeklySeries>) -> Result<Self> {
        Panel::new(series, self.target_id.clone())
    }

    /// Last week where the target is actually observed. Covariate tiers can
    /// extend the aligned range past it; nothing can be fitted or forecast
    /// from those weeks.
    pub fn last_target_week(&self) -> Option<WeekIndex> {
        let target = self.target();
        target
            .observations()
            .last()
            .map(|(i, _)| target.week_at(*i))
    }

    /// Truncates every member to weeks `<= cutoff`.
    pub fn truncate_at(&self, cutoff: WeekIndex) -> Result<Self> {
        if cutoff < self.start() {
            return Err(Error::EmptyRange);
        }
        let series = self
            .series
            .iter()
            .map(|s| s.truncate_at(cutoff).expect("cutoff >= start"))
            .collect();
        Panel::new(series, self.target_id.clone())
    }

    /// The trailing `n`-week sub-panel.
    pub fn tail(&self, n: usize) -> Result<Self> {
        let series = self.series.iter().map(|s| s.tail(n)).collect();
        Panel::new(series, self.target_id.clone())
    }
}

/// Re-indexes all series onto one common week range, padding with missing.
pub fn align(
    series: Vec<WeeklySeries>,
    range: AlignRange,
    target_id: impl Into<String>,
) -> Result<Panel> {
    if series.is_empty() {
        return Err(Error::EmptyPanel);
    }
    let (start, end) = match range {
        AlignRange::Union => (
            series.iter().map(|s| s.start()).min().expect("nonempty"),
            series.iter().map(|s| s.end()).max().expect("nonempty"),
        ),
        AlignRange::Intersection => {
            let start = series.iter().map(|s| s.start()).max().expect("nonempty");
            let end = series.iter().map(|s| s.end()).min().expect("nonempty");
            if end < start {
                return Err(Error::DisjointRanges);
            }
            (start, end)
        }
        AlignRange::Explicit(start, end) => {
            if end < start {
                return Err(Error::EmptyRange);
            }
            (start, end)
        }
    };
    let aligned = series
        .into_iter()
        .map(|s| s.reindex(start, end))
        .collect::<Result<Vec<_>>>()?;
    Panel::new(aligned, target_id)
}
