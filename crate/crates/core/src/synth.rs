//! Synthetic panels with planted structure: known lead-lag links, change
//! points, and noise, used as ground truth when testing the pipeline.
//!
//! Generation is bit-reproducible given the seed. The exact algorithm:
//!
//! 1. Covariates are generated in spec order, each from its own ChaCha8
//!    stream keyed by `derive_seed(seed, ["synth-cov", name])`; normals come
//!    from [`crate::rng::standard_normal`] (Box-Muller, two u64 draws each).
//!    - AR(1): x_0 = mean, then x_t = mean + phi (x_{t-1} - mean) + sd N(0,1).
//!    - Step: level_before (t < at_week) or level_after (t >= at_week),
//!      plus sd N(0,1) each week.
//!    - Constant: level every week, no draws.
//! 2. The target uses the stream keyed by ["synth-target"]:
//!    y_t = intercept + sum_links coef * cov_{max(t - lag, 0)} + noise_sd
//!    N(0,1), floored at 0 and rounded half-up to an integer (count-like).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::timeseries::{align, AlignRange, Panel, WeekIndex, WeeklySeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CovariateProcess {
    Ar1 { phi: f64, mean: f64, sd: f64 },
    Step { level_before: f64, level_after: f64, at_week: usize, sd: f64 },
    Constant { level: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovariateSpec {
    pub name: String,
    pub process: CovariateProcess,
}

/// One planted dependence: target gains `coefficient * covariate_{t - lag}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub covariate: String,
    pub lag: usize,
    pub coefficient: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    pub weeks: usize,
    pub start: WeekIndex,
    pub target_id: String,
    pub intercept: f64,
    pub covariates: Vec<CovariateSpec>,
    pub links: Vec<LinkSpec>,
    pub noise_sd: f64,
    pub seed: u64,
}

/// Everything a test needs to assert against: the planted links, the planted
/// change points, and the noise level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruth {
    pub links: Vec<LinkSpec>,
    pub intercept: f64,
    pub noise_sd: f64,
    /// (covariate, first week of the post-break regime) for Step processes.
    pub change_points: Vec<(String, WeekIndex)>,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let max_lag = self.links.iter().map(|l| l.lag).max().unwrap_or(0);
        if self.weeks <= max_lag + 60 {
            return Err(Error::InvalidSpec(format!(
                "need weeks > max lag + 60, got weeks {} with max lag {max_lag}",
                self.weeks
            )));
        }
        if self.noise_sd < 0.0 {
            return Err(Error::InvalidSpec("noise sd must be >= 0".into()));
        }
        for link in &self.links {
            if !self.covariates.iter().any(|c| c.name == link.covariate) {
                return Err(Error::InvalidSpec(format!(
                    "link references unknown covariate '{}'",
                    link.covariate
                )));
            }
        }
        for cov in &self.covariates {
            if let CovariateProcess::Ar1 { phi, .. } = cov.process {
                if phi.abs() >= 1.0 {
                    return Err(Error::InvalidSpec(format!(
                        "AR(1) '{}' needs |phi| < 1, got {phi}",
                        cov.name
                    )));
                }
            }
            if cov.name == self.target_id {
                return Err(Error::InvalidSpec("covariate shares the target id".into()));
            }
        }
        Ok(())
    }
}

fn generate_covariate(spec: &SynthSpec, cov: &CovariateSpec) -> Vec<f64> {
    let mut stream = rng::rng_for(spec.seed, &["synth-cov", &cov.name]);
    match &cov.process {
        CovariateProcess::Ar1 { phi, mean, sd } => {
            let mut values = Vec::with_capacity(spec.weeks);
            let mut x = *mean;
            values.push(x);
            for _ in 1..spec.weeks {
                x = mean + phi * (x - mean) + sd * rng::standard_normal(&mut stream);
                values.push(x);
            }
            values
        }
        CovariateProcess::Step {
            level_before,
            level_after,
            at_week,
            sd,
        } => (0..spec.weeks)
            .map(|t| {
                let base = if t < *at_week { *level_before } else { *level_after };
                base + sd * rng::standard_normal(&mut stream)
            })
            .collect(),
        CovariateProcess::Constant { level } => vec![*level; spec.weeks],
    }
}

/// Generates the panel and its ground-truth record.
pub fn generate(spec: &SynthSpec) -> Result<(Panel, GroundTruth)> {
    spec.validate()?;
    let covariate_values: Vec<Vec<f64>> = spec
        .covariates
        .iter()
        .map(|c| generate_covariate(spec, c))
        .collect();

    let mut noise = rng::rng_for(spec.seed, &["synth-target"]);
    let target_values: Vec<Option<f64>> = (0..spec.weeks)
        .map(|t| {
            let mut v = spec.intercept;
            for link in &spec.links {
                let k = spec
                    .covariates
                    .iter()
                    .position(|c| c.name == link.covariate)
                    .expect("validated");
                v += link.coefficient * covariate_values[k][t.saturating_sub(link.lag)];
            }
            v += spec.noise_sd * rng::standard_normal(&mut noise);
            Some(v.max(0.0).round())
        })
        .collect();

    let mut series = vec![WeeklySeries::new(
        spec.target_id.clone(),
        None,
        spec.start,
        target_values,
    )?];
    for (cov, values) in spec.covariates.iter().zip(covariate_values) {
        series.push(WeeklySeries::new(
            cov.name.clone(),
            None,
            spec.start,
            values.into_iter().map(Some).collect(),
        )?);
    }
    let panel = align(series, AlignRange::Union, spec.target_id.clone())?;
    let change_points = spec
        .covariates
        .iter()
        .filter_map(|c| match &c.process {
            CovariateProcess::Step { at_week, .. } => {
                Some((c.name.clone(), spec.start.plus_weeks(*at_week as i64)))
            }
            _ => None,
        })
        .collect();
    Ok((
        panel,
        GroundTruth {
            links: spec.links.clone(),
            intercept: spec.intercept,
            noise_sd: spec.noise_sd,
            change_points,
        },
    ))
}
