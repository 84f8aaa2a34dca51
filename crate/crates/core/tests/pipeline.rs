//! End-to-end command tests on small synthetic bundles: planted structure
//! in, files out, assertions against ground truth.

use flowcast_core::backtest::{traffic_light, BacktestResult};
use flowcast_core::earlywarn::EarlyWarningReport;
use flowcast_core::forecast::{
    build_design, enet_fit, rolling_lambda_select, window_design, EnetParams, ForecastConfig,
};
use flowcast_core::io::{
    cmd_backtest, cmd_earlywarn, cmd_forecast, cmd_ingest, cmd_report, cmd_synth, write_bundle,
    RunConfig, SynthBundleConfig,
};
use flowcast_core::synth::{generate, CovariateProcess, CovariateSpec, SynthSpec};
use flowcast_core::timeseries::{stats, WeekIndex, WeeklySeries};

fn wk0() -> WeekIndex {
    WeekIndex::new(2016, 1).unwrap()
}

/// Config pointing at a freshly generated bundle in `dir`.
fn synth_config(dir: &std::path::Path, dyads: usize, weeks: usize) -> RunConfig {
    let scfg = SynthBundleConfig {
        out_dir: dir.to_path_buf(),
        dyads,
        weeks,
        ..Default::default()
    };
    cmd_synth(&scfg).expect("synth");
    RunConfig::from_file(dir.join("flowcast.conf")).expect("config")
}

fn read_report(path: &std::path::Path) -> EarlyWarningReport {
    serde_json::from_reader(std::fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn ingest_summary_reflects_the_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = synth_config(dir.path(), 2, 100);
    cfg.out_dir = dir.path().join("out");
    let outcome = cmd_ingest(&cfg).unwrap();
    assert_eq!(outcome.files.len(), 1);
    let summary: serde_json::Value =
        serde_json::from_reader(std::fs::File::open(&outcome.files[0]).unwrap()).unwrap();
    assert_eq!(summary["application_series"], 2);
    assert_eq!(summary["origins"], serde_json::json!(["S0", "S1"]));
}

#[test]
fn planted_step_shows_up_in_the_earlywarn_report() {
    let dir = tempfile::tempdir().unwrap();
    let weeks = 120usize;
    let step_at = 100usize;
    let spec = SynthSpec {
        weeks,
        start: wk0(),
        target_id: "applicant.DE".into(),
        intercept: 300.0,
        covariates: vec![
            CovariateSpec {
                name: "gt.Passport".into(),
                process: CovariateProcess::Ar1 {
                    phi: 0.7,
                    mean: 50.0,
                    sd: 5.0,
                },
            },
            CovariateSpec {
                name: "gt.Refugee".into(),
                process: CovariateProcess::Step {
                    level_before: 20.0,
                    level_after: 70.0,
                    at_week: step_at,
                    sd: 2.0,
                },
            },
        ],
        links: vec![],
        noise_sd: 8.0,
        seed: 11,
    };
    let (panel, truth) = generate(&spec).unwrap();
    // Wrap the panel into a bundle on disk.
    let mut bundle = flowcast_core::io::DatasetBundle::default();
    bundle.applications.insert(
        ("S0".into(), "DE".into()),
        WeeklySeries::new(
            "applicant.DE",
            Some("S0".into()),
            panel.target().start(),
            panel.target().values().to_vec(),
        )
        .unwrap(),
    );
    for cov in panel.covariates() {
        let topic = cov.id.trim_start_matches("gt.").to_string();
        bundle.trends.insert(
            ("S0".into(), topic),
            WeeklySeries::new(
                cov.id.clone(),
                Some("S0".into()),
                cov.start(),
                cov.values()
                    .iter()
                    .map(|v| v.map(|x| x.clamp(0.0, 100.0)))
                    .collect(),
            )
            .unwrap(),
        );
    }
    let paths = write_bundle(&bundle, dir.path()).unwrap();
    let cfg = RunConfig {
        paths,
        out_dir: dir.path().join("out"),
        ..Default::default()
    };
    cmd_earlywarn(&cfg).unwrap();

    let report = read_report(&cfg.out_dir.join("earlywarn_S0.json"));
    let signals = report
        .series
        .iter()
        .find(|s| s.id == "gt.Refugee")
        .expect("step series analyzed");
    let cp = signals.mean_cp.as_ref().expect("mean test ran");
    let planted = truth.change_points[0].1;
    let location = cp.location.expect("step detected");
    assert!(
        planted.weeks_until(location).abs() <= 3,
        "located {location}, planted {planted}"
    );
    assert!(signals.alert_level > flowcast_core::earlywarn::AlertLevel::L0);
}

#[test]
fn all_quiet_bundle_is_all_l0() {
    let dir = tempfile::tempdir().unwrap();
    let mut bundle = flowcast_core::io::DatasetBundle::default();
    bundle.applications.insert(
        ("S0".into(), "DE".into()),
        WeeklySeries::new(
            "applicant.DE",
            Some("S0".into()),
            wk0(),
            vec![Some(500.0); 120],
        )
        .unwrap(),
    );
    bundle.trends.insert(
        ("S0".into(), "Passport".into()),
        WeeklySeries::new("gt.Passport", Some("S0".into()), wk0(), vec![Some(40.0); 120]).unwrap(),
    );
    let paths = write_bundle(&bundle, dir.path()).unwrap();
    let cfg = RunConfig {
        paths,
        out_dir: dir.path().join("out"),
        ..Default::default()
    };
    cmd_earlywarn(&cfg).unwrap();
    let report = read_report(&cfg.out_dir.join("earlywarn_S0.json"));
    for s in &report.series {
        assert_eq!(s.alert_level, flowcast_core::earlywarn::AlertLevel::L0, "{}", s.id);
    }
    assert_eq!(report.total_alerts, 0);
    // A flat target carries no statistical information: flagged.
    assert!(!report.target_retained);
}

#[test]
fn missing_origin_is_isolated() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = synth_config(dir.path(), 1, 100);
    cfg.origins = vec!["S0".to_string(), "ZZ".to_string()];
    cfg.out_dir = dir.path().join("out");
    let outcome = cmd_earlywarn(&cfg).unwrap();
    assert!(cfg.out_dir.join("earlywarn_S0.json").exists());
    assert!(!cfg.out_dir.join("earlywarn_ZZ.json").exists());
    let errors: Vec<serde_json::Value> =
        serde_json::from_reader(std::fs::File::open(cfg.out_dir.join("earlywarn_errors.json")).unwrap())
            .unwrap();
    assert_eq!(errors.len(), 1);
    assert_eq!(errors[0]["origin"], "ZZ");
    assert!(outcome.diagnostics.iter().any(|d| d.contains("ZZ")));
}

#[test]
fn forecast_emits_four_rows_per_dyad_and_flags_filtered() {
    let dir = tempfile::tempdir().unwrap();
    let scfg = SynthBundleConfig {
        out_dir: dir.path().to_path_buf(),
        dyads: 2,
        weeks: 120,
        ..Default::default()
    };
    let (mut bundle, _) = flowcast_core::io::synth_bundle(&scfg).unwrap();
    // Make S1's target constant: it must fail the cv rule and be reported
    // as filtered rather than forecast.
    let flat = WeeklySeries::new("applicant.DE", Some("S1".into()), wk0(), vec![Some(400.0); 120])
        .unwrap();
    bundle.applications.insert(("S1".into(), "DE".into()), flat);
    let paths = write_bundle(&bundle, dir.path()).unwrap();
    let cfg = RunConfig {
        paths,
        out_dir: dir.path().join("out"),
        ..Default::default()
    };
    cmd_forecast(&cfg).unwrap();

    let csv = std::fs::read_to_string(cfg.out_dir.join("forecast.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    let s0_rows: Vec<&&str> = lines.iter().filter(|l| l.starts_with("S0,DE")).collect();
    assert_eq!(s0_rows.len(), 4, "one row per horizon");
    for (i, row) in s0_rows.iter().enumerate() {
        assert!(row.contains(&format!(",{},", i + 1)));
        assert!(row.ends_with(",ok"));
    }
    let s1_rows: Vec<&&str> = lines.iter().filter(|l| l.starts_with("S1,DE")).collect();
    assert_eq!(s1_rows.len(), 1);
    assert!(s1_rows[0].ends_with(",filtered"), "{}", s1_rows[0]);
}

#[test]
fn backtest_single_evaluated_week_and_report_consistency() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = synth_config(dir.path(), 1, 120);
    // The data's last target week: weeks=120 starting 2016-W01.
    let last = wk0().plus_weeks(119);
    let horizon = cfg.fc.n_ahead as i64;
    cfg.start_date = last.plus_weeks(-horizon).monday();
    cfg.out_dir = dir.path().join("bt");
    cmd_backtest(&cfg).unwrap();

    let results: Vec<BacktestResult> = serde_json::from_reader(
        std::fs::File::open(cfg.out_dir.join("backtest_summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(results.len(), 1);
    let result = &results[0];
    let evaluated: Vec<_> = result
        .rows
        .iter()
        .filter(|r| r.actual_total.is_some() && r.forecast_total.is_some())
        .collect();
    assert_eq!(evaluated.len(), 1, "exactly one evaluated as-of week");
    assert_eq!(
        result.model_stats.as_ref().unwrap().n_weeks,
        1
    );

    // Report layer: heatmap rows match ok weeks; classes re-derive.
    cmd_report(&cfg).unwrap();
    let heatmap = std::fs::read_to_string(cfg.out_dir.join("heatmap_S0_DE.csv")).unwrap();
    let ok_weeks = result.rows.iter().filter(|r| r.status == "ok").count();
    assert_eq!(heatmap.lines().count(), ok_weeks + 1);
    let traffic = std::fs::read_to_string(cfg.out_dir.join("traffic_summary.csv")).unwrap();
    let stats_row = traffic.lines().nth(1).unwrap();
    let model = result.model_stats.as_ref().unwrap();
    let expect = traffic_light(model.mean_rel_pct, model.mean_abs);
    assert!(stats_row.contains(&expect.to_string()));
}

#[test]
fn report_without_backtest_is_a_missing_input() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        out_dir: dir.path().join("empty"),
        ..Default::default()
    };
    let err = cmd_report(&cfg).unwrap_err();
    assert_eq!(err.kind(), flowcast_core::ErrorKind::Input);
}

/// With nothing planted, a moderate penalty (one quarter of the target's
/// spread per unit correlation) empties the active set in nearly every
/// seed; spurious correlations at n = 120 sit far below it.
#[test]
fn zero_coefficients_mean_empty_active_set_at_moderate_lambda() {
    let mut empty = 0;
    let seeds = 20u64;
    for seed in 0..seeds {
        let spec = SynthSpec {
            weeks: 120,
            start: wk0(),
            target_id: "applicant.DE".into(),
            intercept: 200.0,
            covariates: vec![
                CovariateSpec {
                    name: "gt.A".into(),
                    process: CovariateProcess::Ar1 {
                        phi: 0.3,
                        mean: 50.0,
                        sd: 8.0,
                    },
                },
                CovariateSpec {
                    name: "gt.B".into(),
                    process: CovariateProcess::Ar1 {
                        phi: 0.3,
                        mean: 30.0,
                        sd: 5.0,
                    },
                },
            ],
            links: vec![],
            noise_sd: 10.0,
            seed,
        };
        let (panel, _) = generate(&spec).unwrap();
        let base = build_design(&panel, &[]);
        let design = window_design(&base, 0, 120, 4).unwrap();
        let sd_y = stats::sample_sd(&design.y);
        let alpha = 0.5;
        let lambda_moderate = 0.25 * sd_y / alpha;
        let fit = enet_fit(&design, alpha, lambda_moderate, None, None, EnetParams::default())
            .unwrap();
        if fit.active_set().is_empty() {
            empty += 1;
        }
    }
    assert!(
        empty as f64 / seeds as f64 >= 0.9,
        "active set empty in only {empty}/{seeds} seeds"
    );

    // Sanity: the same moderate penalty keeps a genuinely linked covariate.
    let spec = SynthSpec {
        weeks: 120,
        start: wk0(),
        target_id: "applicant.DE".into(),
        intercept: 50.0,
        covariates: vec![CovariateSpec {
            name: "gt.A".into(),
            process: CovariateProcess::Ar1 {
                phi: 0.7,
                mean: 50.0,
                sd: 10.0,
            },
        }],
        links: vec![flowcast_core::synth::LinkSpec {
            covariate: "gt.A".into(),
            lag: 0,
            coefficient: 4.0,
        }],
        noise_sd: 5.0,
        seed: 999,
    };
    let (panel, _) = generate(&spec).unwrap();
    let base = build_design(&panel, &[]);
    let design = window_design(&base, 0, 120, 4).unwrap();
    let lambda_moderate = 0.25 * stats::sample_sd(&design.y) / 0.5;
    let fit = enet_fit(&design, 0.5, lambda_moderate, None, None, EnetParams::default()).unwrap();
    assert!(fit.active_set().contains(&"gt.A"));
}

/// The rolling penalty selection on an informative design returns a penalty
/// whose final fit actually uses the planted column.
#[test]
fn selection_plus_fit_keeps_the_planted_column() {
    let spec = SynthSpec {
        weeks: 130,
        start: wk0(),
        target_id: "applicant.DE".into(),
        intercept: 60.0,
        covariates: vec![CovariateSpec {
            name: "gt.Passport".into(),
            process: CovariateProcess::Ar1 {
                phi: 0.85,
                mean: 50.0,
                sd: 9.0,
            },
        }],
        links: vec![flowcast_core::synth::LinkSpec {
            covariate: "gt.Passport".into(),
            lag: 4,
            coefficient: 4.0,
        }],
        noise_sd: 5.0,
        seed: 4242,
    };
    let (panel, _) = generate(&spec).unwrap();
    let base = build_design(&panel, &[("gt.Passport".to_string(), 4)]);
    let cfg = ForecastConfig::default();
    let sel = rolling_lambda_select(&base, &cfg).unwrap();
    let start = base.weeks.len() - cfg.prediction_win;
    let design = window_design(&base, start, cfg.prediction_win, 4).unwrap();
    let fit = enet_fit(&design, cfg.alpha, sel.lambda, None, None, EnetParams::default()).unwrap();
    assert!(
        fit.active_set().iter().any(|c| c.contains("@lag4")),
        "active set {:?}",
        fit.active_set()
    );
}
