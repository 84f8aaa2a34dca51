//! Run configuration: a key-value file of dotted parameter names
//! (cv.thr, ma.th, n.ahead, ...), overridable from the CLI.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::earlywarn::EarlyWarningConfig;
use crate::error::{Error, Result};
use crate::forecast::ForecastConfig;
use crate::timeseries::parse_date;

/// Input file locations. Only applications are mandatory; the weight table
/// falls back to the embedded default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DataPaths {
    pub applications: Option<PathBuf>,
    pub decisions: Option<PathBuf>,
    pub ibc: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub trends: Option<PathBuf>,
    pub weights: Option<PathBuf>,
}

/// The seventeen default search topics.
pub const DEFAULT_TOPICS: [&str; 17] = [
    "Passport",
    "Travel",
    "Travel visa",
    "Refugee",
    "Right of Asylum",
    "Egypt",
    "Iraq",
    "Jordan",
    "Lebanon",
    "Turkey",
    "Cyprus",
    "France",
    "Germany",
    "Greece",
    "Italy",
    "Spain",
    "European Union",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub ew: EarlyWarningConfig,
    pub fc: ForecastConfig,
    /// Back-testing starts at the week containing this date.
    pub start_date: NaiveDate,
    /// Back-testing ends here; `None` runs to the end of the data.
    pub final_date: Option<NaiveDate>,
    /// Minimum history (weeks) before the back-test start.
    pub training_floor: usize,
    /// Analysis cutoff for earlywarn/forecast (refDate); `None` = all data.
    pub as_of: Option<NaiveDate>,
    /// Origin country codes; empty = every origin in the data.
    pub origins: Vec<String>,
    /// Destination country codes; empty = every destination in the data.
    pub destinations: Vec<String>,
    pub topics: Vec<String>,
    pub seed: u64,
    pub paths: DataPaths,
    pub out_dir: PathBuf,
    pub emit_svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ew: EarlyWarningConfig::default(),
            fc: ForecastConfig::default(),
            start_date: NaiveDate::from_ymd_opt(2017, 1, 1).expect("valid date"),
            final_date: None,
            training_floor: 50,
            as_of: None,
            origins: Vec::new(),
            destinations: Vec::new(),
            topics: DEFAULT_TOPICS.iter().map(|s| s.to_string()).collect(),
            seed: 42,
            paths: DataPaths::default(),
            out_dir: PathBuf::from("out"),
            emit_svg: false,
        }
    }
}

fn parse_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

impl RunConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidConfig(format!("bad value '{value}' for {what}"));
        match key {
            "cv.thr" => self.ew.cv_thr = value.parse().map_err(|_| bad(key))?,
            "ibc.thr" => self.ew.ibc_thr = value.parse().map_err(|_| bad(key))?,
            "applicant.thr" => self.ew.applicant_thr = value.parse().map_err(|_| bad(key))?,
            "pending.thr" => self.ew.pending_thr = value.parse().map_err(|_| bad(key))?,
            "decision.thr" => self.ew.decision_thr = value.parse().map_err(|_| bad(key))?,
            "na.th" => self.ew.na_thr = value.parse().map_err(|_| bad(key))?,
            "ma1" => self.ew.ma1 = value.parse().map_err(|_| bad(key))?,
            "ma2" => self.ew.ma2 = value.parse().map_err(|_| bad(key))?,
            "ma.th" => self.ew.ma_thr = value.parse().map_err(|_| bad(key))?,
            "clean.w" => self.ew.clean_w = value.parse().map_err(|_| bad(key))?,
            "alert.w" => self.ew.alert_w = value.parse().map_err(|_| bad(key))?,
            "back.w" => self.ew.back_w = value.parse().map_err(|_| bad(key))?,
            "pvalue" => self.ew.pvalue = value.parse().map_err(|_| bad(key))?,
            "llag.th" => self.ew.llag_thr = value.parse().map_err(|_| bad(key))?,
            "delta.max" => self.ew.delta_max = value.parse().map_err(|_| bad(key))?,
            "n.permutations" => self.ew.n_permutations = value.parse().map_err(|_| bad(key))?,
            "n.ahead" => self.fc.n_ahead = value.parse().map_err(|_| bad(key))?,
            "prediction.win" => self.fc.prediction_win = value.parse().map_err(|_| bad(key))?,
            "alpha" => self.fc.alpha = value.parse().map_err(|_| bad(key))?,
            "burn" => self.fc.burn = value.parse().map_err(|_| bad(key))?,
            "training.weeks" => self.fc.training_weeks = value.parse().map_err(|_| bad(key))?,
            "lambda.grid.size" => self.fc.lambda_grid_size = value.parse().map_err(|_| bad(key))?,
            "lambda.min.ratio" => self.fc.lambda_min_ratio = value.parse().map_err(|_| bad(key))?,
            "start.date" => self.start_date = parse_date(value)?,
            "final.date" => self.final_date = Some(parse_date(value)?),
            // refDate is the historical name for the analysis cutoff.
            "refDate" | "as.of" => self.as_of = Some(parse_date(value)?),
            "training.floor" => self.training_floor = value.parse().map_err(|_| bad(key))?,
            "seed" => self.seed = value.parse().map_err(|_| bad(key))?,
            "country" | "origins" => self.origins.extend(parse_list(value)),
            "destinations" => self.destinations.extend(parse_list(value)),
            "topics" => self.topics = parse_list(value),
            "out.dir" => self.out_dir = PathBuf::from(value),
            "emit.svg" => {
                self.emit_svg = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(bad(key)),
                }
            }
            "data.applications" => self.paths.applications = Some(PathBuf::from(value)),
            "data.decisions" => self.paths.decisions = Some(PathBuf::from(value)),
            "data.ibc" => self.paths.ibc = Some(PathBuf::from(value)),
            "data.events" => self.paths.events = Some(PathBuf::from(value)),
            "data.trends" => self.paths.trends = Some(PathBuf::from(value)),
            "data.weights" => self.paths.weights = Some(PathBuf::from(value)),
            other => {
                return Err(Error::InvalidConfig(format!("unknown parameter '{other}'")))
            }
        }
        Ok(())
    }

    /// Parses a config file of `key = value` lines; '#' starts a comment.
    pub fn from_file(path: impl AsRef<Path>) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let text = std::fs::read_to_string(&path)?;
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "{}:{}: expected key = value",
                    path.as_ref().display(),
                    lineno + 1
                )));
            };
            let key = key.trim();
            // Origins/destinations accumulate; everything else overwrites,
            // and a repeated scalar key is almost always a mistake.
            if !matches!(key, "country" | "origins" | "destinations") && !seen.insert(key.to_string())
            {
                return Err(Error::InvalidConfig(format!(
                    "{}:{}: duplicate parameter '{key}'",
                    path.as_ref().display(),
                    lineno + 1
                )));
            }
            cfg.set(key, value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.ew.validate()?;
        self.fc.validate()?;
        if let Some(final_date) = self.final_date {
            if final_date < self.start_date {
                return Err(Error::InvalidConfig(
                    "final.date precedes start.date".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn backtest_config(&self) -> crate::backtest::BacktestConfig {
        crate::backtest::BacktestConfig {
            start_date: self.start_date,
            final_date: self.final_date,
            training_floor: self.training_floor,
            seed: self.seed,
            ew: self.ew.clone(),
            fc: self.fc.clone(),
            rank_variables: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_documented_ones() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.ew.cv_thr, 0.05);
        assert_eq!(cfg.ew.ibc_thr, 100.0);
        assert_eq!(cfg.ew.applicant_thr, 100.0);
        assert_eq!(cfg.ew.pending_thr, 100.0);
        assert_eq!(cfg.ew.decision_thr, 100.0);
        assert_eq!(cfg.ew.na_thr, 0.3);
        assert_eq!(cfg.ew.ma1, 6);
        assert_eq!(cfg.ew.ma2, 24);
        assert_eq!(cfg.ew.ma_thr, 1.1);
        assert_eq!(cfg.ew.clean_w, 6);
        assert_eq!(cfg.ew.alert_w, 12);
        assert_eq!(cfg.ew.back_w, 24);
        assert_eq!(cfg.ew.pvalue, 0.05);
        assert_eq!(cfg.ew.llag_thr, 0.05);
        assert_eq!(cfg.fc.n_ahead, 4);
        assert_eq!(cfg.fc.prediction_win, 12);
        assert_eq!(cfg.fc.alpha, 0.5);
        assert_eq!(cfg.fc.burn, 12);
        assert_eq!(cfg.start_date.to_string(), "2017-01-01");
        assert_eq!(cfg.topics.len(), 17);
    }

    #[test]
    fn file_round_trip_with_verbatim_names() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(
            &path,
            "# test config\n\
             cv.thr = 0.08\n\
             ma.th = 1.2   # momentum threshold\n\
             n.ahead = 2\n\
             country = SY\n\
             origins = IQ, AF\n\
             destinations = DE\n\
             refDate = 2018-06-17\n\
             seed = 7\n\
             data.applications = apps.csv\n",
        )
        .unwrap();
        let cfg = RunConfig::from_file(&path).unwrap();
        assert_eq!(cfg.ew.cv_thr, 0.08);
        assert_eq!(cfg.ew.ma_thr, 1.2);
        assert_eq!(cfg.fc.n_ahead, 2);
        assert_eq!(cfg.origins, vec!["SY", "IQ", "AF"]);
        assert_eq!(cfg.destinations, vec!["DE"]);
        assert_eq!(cfg.as_of.unwrap().to_string(), "2018-06-17");
        assert_eq!(cfg.seed, 7);
        assert_eq!(
            cfg.paths.applications.as_ref().unwrap().to_str().unwrap(),
            "apps.csv"
        );
    }

    #[test]
    fn unknown_and_duplicate_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.conf");
        std::fs::write(&path, "not.a.key = 1\n").unwrap();
        assert!(RunConfig::from_file(&path).is_err());
        std::fs::write(&path, "ma1 = 4\nma1 = 5\n").unwrap();
        assert!(RunConfig::from_file(&path).is_err());
        std::fs::write(&path, "ma1 = 30\n").unwrap(); // ma1 >= ma2
        assert!(RunConfig::from_file(&path).is_err());
    }
}
