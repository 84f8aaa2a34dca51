//! File-based ingestion of the five data tiers and panel assembly.
//!
//! CSV schemas (UTF-8, header row mandatory):
//!   applications: week,origin,destination,count
//!   decisions:    month,origin,destination,positive,total
//!   ibc:          month,route,origin,count
//!   events:       date,country,code,is_root,source_key
//!   trends:       week,country,topic,volume

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::events::{
    compute_indices, dedupe_events, EventIndexSet, EventRecord, EventWeightTable,
};
use crate::io::config::{DataPaths, RunConfig};
use crate::timeseries::{
    align, format_month, interpolate_monthly_to_weekly, parse_date, parse_month, AlignRange,
    MonthlySeries, Panel, WeekIndex, WeeklySeries,
};

/// The typed, validated in-memory bundle.
#[derive(Debug, Clone, Default)]
pub struct DatasetBundle {
    /// (origin, destination) -> weekly application counts.
    pub applications: BTreeMap<(String, String), WeeklySeries>,
    /// (origin, destination) -> monthly recognition rate (positive/total).
    pub recognition: BTreeMap<(String, String), MonthlySeries>,
    /// (origin, route) -> monthly detections of irregular crossings.
    pub ibc: BTreeMap<(String, String), MonthlySeries>,
    pub events: Vec<EventRecord>,
    /// (country, topic) -> weekly relative search volume.
    pub trends: BTreeMap<(String, String), WeeklySeries>,
    pub diagnostics: Vec<String>,
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)?)
}

fn row_error(path: &Path, record: &csv::StringRecord, msg: impl Into<String>) -> Error {
    Error::MalformedRow {
        file: path.display().to_string(),
        line: record.position().map(|p| p.line()).unwrap_or(0),
        msg: msg.into(),
    }
}

fn expect_header(path: &Path, got: &csv::StringRecord, want: &[&str]) -> Result<()> {
    if got.iter().collect::<Vec<_>>() != want {
        return Err(Error::MalformedRow {
            file: path.display().to_string(),
            line: 1,
            msg: format!(
                "expected header {}, got {}",
                want.join(","),
                got.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    Ok(())
}

fn field<'r>(path: &Path, record: &'r csv::StringRecord, idx: usize) -> Result<&'r str> {
    record
        .get(idx)
        .ok_or_else(|| row_error(path, record, format!("missing field {idx}")))
}

fn parse_count(path: &Path, record: &csv::StringRecord, idx: usize) -> Result<f64> {
    let raw = field(path, record, idx)?;
    let v: f64 = raw
        .parse()
        .map_err(|_| row_error(path, record, format!("bad number '{raw}'")))?;
    if !v.is_finite() || v < 0.0 {
        return Err(row_error(path, record, format!("count must be >= 0, got {raw}")));
    }
    Ok(v)
}

/// Accumulates (key, time, value) rows into per-key series; duplicate
/// (key, time) pairs are an error.
struct SeriesAccum<K: Ord + Clone, T: Ord + Copy> {
    data: BTreeMap<K, BTreeMap<T, f64>>,
}

impl<K: Ord + Clone + std::fmt::Debug, T: Ord + Copy> SeriesAccum<K, T> {
    fn new() -> Self {
        SeriesAccum {
            data: BTreeMap::new(),
        }
    }

    fn push(
        &mut self,
        path: &Path,
        record: &csv::StringRecord,
        key: K,
        time: T,
        value: f64,
    ) -> Result<()> {
        if self
            .data
            .entry(key.clone())
            .or_default()
            .insert(time, value)
            .is_some()
        {
            return Err(row_error(path, record, format!("duplicate row for {key:?}")));
        }
        Ok(())
    }
}

fn weekly_from_map(id: &str, origin: Option<String>, map: &BTreeMap<WeekIndex, f64>) -> WeeklySeries {
    let start = *map.keys().next().expect("nonempty");
    let end = *map.keys().next_back().expect("nonempty");
    let values = start.range_through(end).map(|w| map.get(&w).copied()).collect();
    WeeklySeries::new(id, origin, start, values).expect("nonempty")
}

fn monthly_from_map(id: &str, map: &BTreeMap<(i32, u32), Option<f64>>) -> MonthlySeries {
    let (first, last) = (
        *map.keys().next().expect("nonempty"),
        *map.keys().next_back().expect("nonempty"),
    );
    let mut values = Vec::new();
    let (mut y, mut m) = first;
    loop {
        values.push(map.get(&(y, m)).copied().flatten());
        if (y, m) == last {
            break;
        }
        m += 1;
        if m > 12 {
            m = 1;
            y += 1;
        }
    }
    MonthlySeries::new(id, first.0, first.1, values).expect("nonempty")
}

type MonthMaps = BTreeMap<(String, String), BTreeMap<(i32, u32), Option<f64>>>;

/// Reads and validates the bundle. Rows violating the schema abort with a
/// file:line diagnostic; soft issues (zero-decision months) go to
/// `diagnostics`.
pub fn ingest(paths: &DataPaths) -> Result<DatasetBundle> {
    let mut bundle = DatasetBundle::default();

    let app_path = paths
        .applications
        .as_ref()
        .ok_or_else(|| Error::MissingInput("data.applications is not set".into()))?;
    {
        let mut rdr = reader(app_path)?;
        expect_header(app_path, rdr.headers()?, &["week", "origin", "destination", "count"])?;
        let mut accum: SeriesAccum<(String, String), WeekIndex> = SeriesAccum::new();
        for record in rdr.records() {
            let record = record?;
            let week: WeekIndex = field(app_path, &record, 0)?
                .parse()
                .map_err(|e: Error| row_error(app_path, &record, e.to_string()))?;
            let origin = field(app_path, &record, 1)?.to_string();
            let dest = field(app_path, &record, 2)?.to_string();
            let count = parse_count(app_path, &record, 3)?;
            accum.push(app_path, &record, (origin, dest), week, count)?;
        }
        if accum.data.is_empty() {
            return Err(Error::NoTargetData);
        }
        for ((origin, dest), map) in accum.data {
            let id = format!("applicant.{dest}");
            bundle
                .applications
                .insert((origin.clone(), dest), weekly_from_map(&id, Some(origin), &map));
        }
    }

    if let Some(path) = &paths.decisions {
        let mut rdr = reader(path)?;
        expect_header(
            path,
            rdr.headers()?,
            &["month", "origin", "destination", "positive", "total"],
        )?;
        let mut accum: MonthMaps = BTreeMap::new();
        for record in rdr.records() {
            let record = record?;
            let month = parse_month(field(path, &record, 0)?)
                .map_err(|e| row_error(path, &record, e.to_string()))?;
            let origin = field(path, &record, 1)?.to_string();
            let dest = field(path, &record, 2)?.to_string();
            let positive = parse_count(path, &record, 3)?;
            let total = parse_count(path, &record, 4)?;
            if positive > total {
                return Err(row_error(
                    path,
                    &record,
                    format!("positive {positive} exceeds total {total}"),
                ));
            }
            // Recognition rate: share of decisions granting protection.
            let rate = if total == 0.0 {
                bundle.diagnostics.push(format!(
                    "warning: {}:{}: zero decisions for {origin}->{dest} {}; rate missing",
                    path.display(),
                    record.position().map(|p| p.line()).unwrap_or(0),
                    format_month(month.0, month.1),
                ));
                None
            } else {
                Some(positive / total)
            };
            let prev = accum
                .entry((origin.clone(), dest.clone()))
                .or_default()
                .insert(month, rate);
            if prev.is_some() {
                return Err(row_error(path, &record, format!("duplicate row for {origin}->{dest}")));
            }
        }
        for ((origin, dest), map) in accum {
            let id = format!("rr.{dest}");
            bundle
                .recognition
                .insert((origin, dest), monthly_from_map(&id, &map));
        }
    }

    if let Some(path) = &paths.ibc {
        let mut rdr = reader(path)?;
        expect_header(path, rdr.headers()?, &["month", "route", "origin", "count"])?;
        let mut accum: SeriesAccum<(String, String), (i32, u32)> = SeriesAccum::new();
        for record in rdr.records() {
            let record = record?;
            let month = parse_month(field(path, &record, 0)?)
                .map_err(|e| row_error(path, &record, e.to_string()))?;
            let route = field(path, &record, 1)?.to_string();
            let origin = field(path, &record, 2)?.to_string();
            let count = parse_count(path, &record, 3)?;
            accum.push(path, &record, (origin, route), month, count)?;
        }
        for ((origin, route), map) in accum.data {
            let with_some: BTreeMap<(i32, u32), Option<f64>> =
                map.into_iter().map(|(k, v)| (k, Some(v))).collect();
            let id = format!("ibc.{route}");
            bundle
                .ibc
                .insert((origin, route), monthly_from_map(&id, &with_some));
        }
    }

    if let Some(path) = &paths.events {
        let mut rdr = reader(path)?;
        expect_header(
            path,
            rdr.headers()?,
            &["date", "country", "code", "is_root", "source_key"],
        )?;
        for record in rdr.records() {
            let record = record?;
            let date = parse_date(field(path, &record, 0)?)
                .map_err(|e| row_error(path, &record, e.to_string()))?;
            let country = field(path, &record, 1)?.to_string();
            let code = field(path, &record, 2)?.to_string();
            let is_root = match field(path, &record, 3)? {
                "1" | "true" => true,
                "0" | "false" => false,
                other => return Err(row_error(path, &record, format!("bad is_root '{other}'"))),
            };
            let source_key = field(path, &record, 4)?.to_string();
            if source_key.is_empty() {
                return Err(row_error(path, &record, "empty source_key"));
            }
            bundle.events.push(EventRecord {
                date,
                country,
                code,
                is_root,
                source_key,
            });
        }
    }

    if let Some(path) = &paths.trends {
        let mut rdr = reader(path)?;
        expect_header(path, rdr.headers()?, &["week", "country", "topic", "volume"])?;
        let mut accum: SeriesAccum<(String, String), WeekIndex> = SeriesAccum::new();
        for record in rdr.records() {
            let record = record?;
            let week: WeekIndex = field(path, &record, 0)?
                .parse()
                .map_err(|e: Error| row_error(path, &record, e.to_string()))?;
            let country = field(path, &record, 1)?.to_string();
            let topic = field(path, &record, 2)?.to_string();
            let volume = parse_count(path, &record, 3)?;
            if volume > 100.0 {
                return Err(row_error(
                    path,
                    &record,
                    format!("volume must lie in [0, 100], got {volume}"),
                ));
            }
            accum.push(path, &record, (country, topic), week, volume)?;
        }
        for ((country, topic), map) in accum.data {
            let id = format!("gt.{topic}");
            bundle
                .trends
                .insert((country.clone(), topic), weekly_from_map(&id, Some(country), &map));
        }
    }

    Ok(bundle)
}

/// Writes a bundle back to the same CSV schemas. Numbers print in their
/// shortest round-trip form, so emit + ingest reproduces the bundle.
pub fn write_bundle(bundle: &DatasetBundle, dir: impl AsRef<Path>) -> Result<DataPaths> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut paths = DataPaths::default();

    let app_path = dir.join("applications.csv");
    let mut f = std::fs::File::create(&app_path)?;
    writeln!(f, "week,origin,destination,count")?;
    for ((origin, dest), series) in &bundle.applications {
        for (week, value) in series.iter() {
            if let Some(v) = value {
                writeln!(f, "{week},{origin},{dest},{v}")?;
            }
        }
    }
    paths.applications = Some(app_path);

    if !bundle.recognition.is_empty() {
        let path = dir.join("decisions.csv");
        let mut f = std::fs::File::create(&path)?;
        writeln!(f, "month,origin,destination,positive,total")?;
        // Rates are re-emitted over a fixed denominator of 1000 decisions.
        for ((origin, dest), series) in &bundle.recognition {
            for (i, value) in series.values().iter().enumerate() {
                if let Some(rate) = value {
                    let (y, m) = series.month_at(i);
                    writeln!(
                        f,
                        "{},{origin},{dest},{},1000",
                        format_month(y, m),
                        (rate * 1000.0).round()
                    )?;
                }
            }
        }
        paths.decisions = Some(path);
    }

    if !bundle.ibc.is_empty() {
        let path = dir.join("ibc.csv");
        let mut f = std::fs::File::create(&path)?;
        writeln!(f, "month,route,origin,count")?;
        for ((origin, route), series) in &bundle.ibc {
            for (i, value) in series.values().iter().enumerate() {
                if let Some(v) = value {
                    let (y, m) = series.month_at(i);
                    writeln!(f, "{},{route},{origin},{v}", format_month(y, m))?;
                }
            }
        }
        paths.ibc = Some(path);
    }

    if !bundle.events.is_empty() {
        let path = dir.join("events.csv");
        let mut f = std::fs::File::create(&path)?;
        writeln!(f, "date,country,code,is_root,source_key")?;
        for e in &bundle.events {
            writeln!(
                f,
                "{},{},{},{},{}",
                e.date,
                e.country,
                e.code,
                if e.is_root { 1 } else { 0 },
                e.source_key
            )?;
        }
        paths.events = Some(path);
    }

    if !bundle.trends.is_empty() {
        let path = dir.join("trends.csv");
        let mut f = std::fs::File::create(&path)?;
        writeln!(f, "week,country,topic,volume")?;
        for ((country, topic), series) in &bundle.trends {
            for (week, value) in series.iter() {
                if let Some(v) = value {
                    writeln!(f, "{week},{country},{topic},{v}")?;
                }
            }
        }
        paths.trends = Some(path);
    }
    Ok(paths)
}

/// Bundle plus the derived event indices, ready to assemble panels.
pub struct BundleAnalyzer {
    pub bundle: DatasetBundle,
    pub indices: EventIndexSet,
    topics: Vec<String>,
}

impl BundleAnalyzer {
    pub fn new(bundle: DatasetBundle, table: &EventWeightTable, cfg: &RunConfig) -> Result<Self> {
        let deduped = dedupe_events(&bundle.events);
        let indices = if deduped.is_empty() {
            compute_indices(
                &[],
                table,
                (WeekIndex::new(2000, 1)?, WeekIndex::new(2000, 1)?),
            )?
        } else {
            let start = deduped
                .iter()
                .map(|e| WeekIndex::from_date(e.date))
                .min()
                .expect("nonempty");
            let end = deduped
                .iter()
                .map(|e| WeekIndex::from_date(e.date))
                .max()
                .expect("nonempty");
            compute_indices(&deduped, table, (start, end))?
        };
        Ok(BundleAnalyzer {
            bundle,
            indices,
            topics: cfg.topics.clone(),
        })
    }

    /// Origins present in the applications data (the forecast subjects).
    pub fn origins(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.bundle.applications.keys().map(|(o, _)| o).collect();
        set.into_iter().cloned().collect()
    }

    pub fn destinations_for(&self, origin: &str) -> Vec<String> {
        self.bundle
            .applications
            .keys()
            .filter(|(o, _)| o == origin)
            .map(|(_, d)| d.clone())
            .collect()
    }

    /// Covariate series for one origin: event indices, search topics,
    /// interpolated border crossings and recognition rates.
    fn covariates_for(&self, origin: &str, diagnostics: &mut Vec<String>) -> Vec<WeeklySeries> {
        let mut out = Vec::new();
        if let Some(country) = self.indices.country(origin) {
            for s in country.series() {
                out.push(s.clone());
            }
        }
        for ((c, topic), series) in &self.bundle.trends {
            if c == origin && self.topics.iter().any(|t| t == topic) {
                out.push(series.clone());
            }
        }
        for ((o, _route), series) in &self.bundle.ibc {
            if o == origin {
                match interpolate_monthly_to_weekly(series) {
                    Ok(weekly) => out.push(weekly),
                    Err(e) => diagnostics.push(format!(
                        "warning: cannot interpolate {} for {origin}: {e}",
                        series.id
                    )),
                }
            }
        }
        for ((o, _dest), series) in &self.bundle.recognition {
            if o == origin {
                match interpolate_monthly_to_weekly(series) {
                    Ok(weekly) => out.push(weekly),
                    Err(e) => diagnostics.push(format!(
                        "warning: cannot interpolate {} for {origin}: {e}",
                        series.id
                    )),
                }
            }
        }
        out
    }

    /// Panel for the per-origin early-warning view: all covariates plus all
    /// application series of that origin. Target prefers the EU aggregate.
    pub fn origin_panel(&self, origin: &str) -> Result<(Panel, Vec<String>)> {
        let mut diagnostics = Vec::new();
        let mut series = self.covariates_for(origin, &mut diagnostics);
        let dests = self.destinations_for(origin);
        if dests.is_empty() {
            return Err(Error::SeriesNotFound(format!(
                "no applications for origin {origin}"
            )));
        }
        for dest in &dests {
            series.push(self.bundle.applications[&(origin.to_string(), dest.clone())].clone());
        }
        let target_id = if dests.iter().any(|d| d == "EU") {
            "applicant.EU".to_string()
        } else {
            format!("applicant.{}", dests[0])
        };
        Ok((align(series, AlignRange::Union, target_id)?, diagnostics))
    }

    /// Panel for one origin -> destination dyad: covariates plus the dyad's
    /// application series as target.
    pub fn dyad_panel(&self, origin: &str, dest: &str) -> Result<(Panel, Vec<String>)> {
        let mut diagnostics = Vec::new();
        let target = self
            .bundle
            .applications
            .get(&(origin.to_string(), dest.to_string()))
            .ok_or_else(|| {
                Error::SeriesNotFound(format!("no applications for {origin}->{dest}"))
            })?
            .clone();
        let target_id = target.id.clone();
        let mut series = self.covariates_for(origin, &mut diagnostics);
        series.push(target);
        Ok((align(series, AlignRange::Union, target_id)?, diagnostics))
    }
}

/// Paths in `cfg` resolved into an analyzer with the configured weight
/// table.
pub fn load(cfg: &RunConfig) -> Result<BundleAnalyzer> {
    let table = match &cfg.paths.weights {
        Some(path) => EventWeightTable::from_path(path)?,
        None => EventWeightTable::default_table(),
    };
    let bundle = ingest(&cfg.paths)?;
    BundleAnalyzer::new(bundle, &table, cfg)
}
