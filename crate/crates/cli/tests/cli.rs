//! Binary-level tests: subcommands, flags, exit codes, and report files.

use std::path::Path;
use std::process::Command;

fn flowcast() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flowcast"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let output = flowcast().args(args).output().expect("binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).to_string(),
        String::from_utf8_lossy(&output.stderr).to_string(),
    )
}

fn synth_into(dir: &Path) {
    let (code, _, stderr) = run(&[
        "synth",
        "--out",
        dir.to_str().unwrap(),
        "--dyads",
        "2",
        "--weeks",
        "120",
        "--seed",
        "5",
    ]);
    assert_eq!(code, 0, "synth failed: {stderr}");
}

#[test]
fn synth_then_ingest_then_earlywarn() {
    let dir = tempfile::tempdir().unwrap();
    synth_into(dir.path());
    for file in ["applications.csv", "trends.csv", "events.csv", "flowcast.conf"] {
        assert!(dir.path().join(file).exists(), "{file} missing");
    }
    let conf = dir.path().join("flowcast.conf");
    let out = dir.path().join("out");
    let (code, stdout, stderr) = run(&[
        "ingest",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("ingest_summary.json"));

    let (code, _, stderr) = run(&[
        "earlywarn",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    assert!(out.join("earlywarn.csv").exists());
    assert!(out.join("earlywarn_S0.json").exists());
    let csv = std::fs::read_to_string(out.join("earlywarn.csv")).unwrap();
    assert!(csv.starts_with("origin,as_of,applicants_last_month,total_alerts"));
}

#[test]
fn forecast_respects_origin_filter() {
    let dir = tempfile::tempdir().unwrap();
    synth_into(dir.path());
    let conf = dir.path().join("flowcast.conf");
    let out = dir.path().join("fc");
    let (code, _, stderr) = run(&[
        "forecast",
        "--config",
        conf.to_str().unwrap(),
        "--origin",
        "S1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    let csv = std::fs::read_to_string(out.join("forecast.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.starts_with("S1,")));
    assert_eq!(csv.lines().count(), 5); // header + 4 horizons
}

#[test]
fn missing_file_is_exit_code_one() {
    let (code, _, stderr) = run(&["ingest", "--applications", "/nonexistent/apps.csv"]);
    assert_eq!(code, 1, "{stderr}");
    assert!(stderr.contains("error"));
}

#[test]
fn malformed_csv_is_exit_code_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let apps = dir.path().join("apps.csv");
    std::fs::write(
        &apps,
        "week,origin,destination,count\n2018-W01,SY,DE,-5\n",
    )
    .unwrap();
    let (code, _, stderr) = run(&["ingest", "--applications", apps.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("apps.csv:2"), "{stderr}");
}

#[test]
fn analysis_failure_is_exit_code_two() {
    // Valid schema but far too little history for a back-test.
    let dir = tempfile::tempdir().unwrap();
    let apps = dir.path().join("apps.csv");
    let mut content = String::from("week,origin,destination,count\n");
    let start = flowcast_core::timeseries::WeekIndex::new(2018, 1).unwrap();
    for i in 0..10 {
        content.push_str(&format!("{},SY,DE,{}\n", start.plus_weeks(i), 200 + i));
    }
    std::fs::write(&apps, content).unwrap();
    let (code, _, stderr) = run(&[
        "backtest",
        "--applications",
        apps.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{stderr}");
}

#[test]
fn bad_config_key_is_exit_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "definitely.not.a.key = 1\n").unwrap();
    let (code, _, stderr) = run(&["earlywarn", "--config", conf.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("definitely.not.a.key"), "{stderr}");
}

#[test]
fn seed_flag_changes_synth_output_and_same_seed_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for (out, seed) in [(&a, "5"), (&b, "5"), (&c, "6")] {
        let (code, _, _) = run(&[
            "synth",
            "--out",
            out.to_str().unwrap(),
            "--dyads",
            "1",
            "--weeks",
            "90",
            "--seed",
            seed,
        ]);
        assert_eq!(code, 0);
    }
    let read = |p: &Path| std::fs::read(p.join("applications.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn report_requires_backtest_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "report",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(stderr.contains("backtest"), "{stderr}");
}
