//! Synthetic dataset bundles: planted-truth dyads written out in the same
//! CSV schemas the ingester reads, so the whole pipeline runs on them
//! unmodified.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::events::EventRecord;
use crate::io::bundle::DatasetBundle;
use crate::synth::{
    generate, CovariateProcess, CovariateSpec, GroundTruth, LinkSpec, SynthSpec,
};
use crate::timeseries::{MonthlySeries, WeekIndex, WeeklySeries};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthBundleConfig {
    pub out_dir: PathBuf,
    pub dyads: usize,
    pub weeks: usize,
    pub seed: u64,
    /// Noise sd of the target around the planted linear signal.
    pub noise_sd: f64,
    /// Planted lead of the linked covariate, in weeks.
    pub lag: usize,
    pub coefficient: f64,
    pub intercept: f64,
    /// AR(1) persistence of the linked covariate.
    pub ar_phi: f64,
    /// AR(1) innovation sd of the linked covariate.
    pub ar_sd: f64,
    pub destination: String,
}

impl Default for SynthBundleConfig {
    fn default() -> Self {
        SynthBundleConfig {
            out_dir: PathBuf::from("out"),
            dyads: 10,
            weeks: 170,
            seed: 42,
            noise_sd: 5.0,
            lag: 4,
            coefficient: 4.0,
            intercept: 40.0,
            ar_phi: 0.9,
            ar_sd: 9.0,
            destination: "DE".to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthDyadTruth {
    pub origin: String,
    pub destination: String,
    pub truth: GroundTruth,
}

fn dyad_spec(cfg: &SynthBundleConfig, k: usize, start: WeekIndex) -> SynthSpec {
    SynthSpec {
        weeks: cfg.weeks,
        start,
        target_id: format!("applicant.{}", cfg.destination),
        intercept: cfg.intercept,
        covariates: vec![
            CovariateSpec {
                name: "gt.Passport".into(),
                process: CovariateProcess::Ar1 {
                    phi: cfg.ar_phi,
                    mean: 50.0,
                    sd: cfg.ar_sd,
                },
            },
            // A second, unlinked topic the model should learn to discard.
            CovariateSpec {
                name: "gt.Refugee".into(),
                process: CovariateProcess::Ar1 {
                    phi: 0.6,
                    mean: 40.0,
                    sd: 5.0,
                },
            },
        ],
        links: vec![LinkSpec {
            covariate: "gt.Passport".into(),
            lag: cfg.lag,
            coefficient: cfg.coefficient,
        }],
        noise_sd: cfg.noise_sd,
        seed: crate::rng::derive_seed(cfg.seed, &["synth-dyad", &k.to_string()]),
    }
}

/// Builds the in-memory bundle plus the planted truths. Dyads are named
/// S0..S{n-1} toward one shared destination.
pub fn synth_bundle(cfg: &SynthBundleConfig) -> Result<(DatasetBundle, Vec<SynthDyadTruth>)> {
    let start = WeekIndex::new(2016, 1)?;
    let mut bundle = DatasetBundle::default();
    let mut truths = Vec::new();
    for k in 0..cfg.dyads {
        let origin = format!("S{k}");
        let spec = dyad_spec(cfg, k, start);
        let (panel, truth) = generate(&spec)?;
        let target = panel.target();
        bundle.applications.insert(
            (origin.clone(), cfg.destination.clone()),
            WeeklySeries::new(
                format!("applicant.{}", cfg.destination),
                Some(origin.clone()),
                target.start(),
                target.values().to_vec(),
            )?,
        );
        for cov in panel.covariates() {
            // Trends volumes live in [0, 100]; the AR levels are sized so
            // clamping essentially never binds.
            let clamped: Vec<Option<f64>> = cov
                .values()
                .iter()
                .map(|v| v.map(|x| x.clamp(0.0, 100.0)))
                .collect();
            let topic = cov.id.trim_start_matches("gt.").to_string();
            bundle.trends.insert(
                (origin.clone(), topic),
                WeeklySeries::new(cov.id.clone(), Some(origin.clone()), cov.start(), clamped)?,
            );
        }
        add_auxiliary_tiers(&mut bundle, &origin, start, cfg.weeks)?;
        truths.push(SynthDyadTruth {
            origin,
            destination: cfg.destination.clone(),
            truth,
        });
    }
    Ok((bundle, truths))
}

/// Small deterministic decisions/ibc/events tiers so every ingestion schema
/// is exercised; none of them carries predictive signal.
fn add_auxiliary_tiers(
    bundle: &mut DatasetBundle,
    origin: &str,
    start: WeekIndex,
    weeks: usize,
) -> Result<()> {
    let months = (weeks / 4).max(3);
    let (y0, m0) = (start.iso_year(), 1);
    let rates: Vec<Option<f64>> = (0..months)
        .map(|i| Some(0.30 + 0.20 * (i as f64 / (months - 1).max(1) as f64)))
        .collect();
    bundle.recognition.insert(
        (origin.to_string(), "DE".to_string()),
        MonthlySeries::new("rr.DE", y0, m0, rates)?,
    );
    let counts: Vec<Option<f64>> = (0..months)
        .map(|i| Some(300.0 + 150.0 * ((i as f64 / 6.0).sin())))
        .collect();
    bundle.ibc.insert(
        (origin.to_string(), "EastMed".to_string()),
        MonthlySeries::new("ibc.EastMed", y0, m0, counts)?,
    );
    // A conflict event every third week, one extra burst mid-sample.
    let mut events = Vec::new();
    for w in (0..weeks).step_by(3) {
        events.push(EventRecord {
            date: start.plus_weeks(w as i64).monday(),
            country: origin.to_string(),
            code: "193".to_string(),
            is_root: true,
            source_key: format!("{origin}-fight-{w}"),
        });
    }
    events.push(EventRecord {
        date: start.plus_weeks((weeks / 2) as i64).monday(),
        country: origin.to_string(),
        code: "2042".to_string(),
        is_root: true,
        source_key: format!("{origin}-burst"),
    });
    bundle.events.extend(events);
    Ok(())
}
