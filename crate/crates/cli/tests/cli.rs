mod common;

use std::fs;
use std::process::{Command, Output};

use common::{check_elbow_csv, check_segmentation, data};
use npcpt_cli::{ingest_csv, ColumnSpec, HeaderMode};
use serde_json::Value;

fn npcpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_npcpt")).args(args).output().unwrap()
}

#[test]
fn ingest_named_column() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("hr.csv");
    fs::write(&p, "time,bpm\n0,120\n1,121\n2,125\n").unwrap();
    let s = ingest_csv(&p, &ColumnSpec::Name("bpm".into()), HeaderMode::Auto).unwrap();
    assert_eq!(s.values(), &[120.0, 121.0, 125.0]);
    let t = ingest_csv(&p, &ColumnSpec::Index(0), HeaderMode::Yes).unwrap();
    assert_eq!(t.values(), &[0.0, 1.0, 2.0]);
}

#[test]
fn ingest_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let e = ingest_csv(&empty, &ColumnSpec::Last, HeaderMode::Auto).unwrap_err();
    assert!(e.to_string().contains("empty series"), "{e}");

    let nan = dir.path().join("nan.csv");
    fs::write(&nan, "x\n1\n2\n3\n4\n5\nNaN\n7\n").unwrap();
    let e = ingest_csv(&nan, &ColumnSpec::Last, HeaderMode::Auto).unwrap_err();
    assert!(e.to_string().contains("row 7"), "{e}");
    assert_eq!(e.exit_code(), 2);

    let e = ingest_csv(&nan, &ColumnSpec::Name("bpm".into()), HeaderMode::Auto).unwrap_err();
    assert!(e.to_string().contains("bpm"));
    let e = ingest_csv(&dir.path().join("missing.csv"), &ColumnSpec::Last, HeaderMode::Auto).unwrap_err();
    assert_eq!(e.exit_code(), 2);

    let text = dir.path().join("text.csv");
    fs::write(&text, "1\n2\nfast\n").unwrap();
    let e = ingest_csv(&text, &ColumnSpec::Last, HeaderMode::No).unwrap_err();
    assert!(e.to_string().contains("row 3"), "{e}");
}

#[test]
fn round_trip_at_17_digits() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.csv");
    let v = vec![0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::f64::consts::PI, -0.0, 123456789.123456789];
    npcpt_cli::ingest::write_series_csv(&p, "x", &v).unwrap();
    let back = ingest_csv(&p, &ColumnSpec::Name("x".into()), HeaderMode::Auto).unwrap();
    let bits = |xs: &[f64]| xs.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(back.values()), bits(&v));
}

#[test]
fn contradictory_flags_are_usage_errors() {
    let hr = data("hr.csv");
    let out = npcpt(&["detect", "--penalty", "10", "--crops", "25", "200", hr.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = npcpt(&["detect", "--penalty", "fast", hr.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = npcpt(&["detect", "--K", "0", hr.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = npcpt(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(npcpt(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_input_is_data_error() {
    let out = npcpt(&["detect", "--penalty", "10", "/nonexistent/file.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zones_in_output() {
    let dir = tempfile::tempdir().unwrap();
    let hr = data("hr.csv");
    let out = npcpt(&["detect", "--penalty", "3logn", "--max-hr", "190", "--column", "bpm", hr.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("hr.segmentation.json")).unwrap()).unwrap();
    check_segmentation(&v, false).unwrap();
    let zones: Vec<&str> = v["segments"].as_array().unwrap().iter().map(|s| s["zone"].as_str().unwrap()).collect();
    assert!(zones.contains(&"peak") && zones.contains(&"recovery"), "{zones:?}");

    let out = npcpt(&["detect", "--penalty", "10", "--max-hr", "0", hr.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_keys_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let p = data("data.csv");
    let out = npcpt(&["detect", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("data.segmentation.json")).unwrap();
    let top: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \"") && l.contains(':'))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = top.clone();
    sorted.sort();
    assert_eq!(top, sorted);
}

#[test]
fn bench_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.conf");
    fs::write(&cfg, "model = 3\nn = 200\nmethod = np-pelt+\nreps = 4\nseed = 1\n").unwrap();
    let run = |seed: Option<&str>, env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_npcpt"));
        c.args(["bench", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        if let Some(s) = seed {
            c.args(["--seed", s]);
        }
        match env {
            Some(e) => c.env("NPCPT_SEED", e),
            None => c.env_remove("NPCPT_SEED"),
        };
        let out = c.output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("small.summary.json")).unwrap()).unwrap();
        v
    };
    let v = run(None, None);
    assert_eq!(v["seed"], 1);
    assert!(v["true_positive_rate"]["mean"].is_number());
    assert!(v["wall_time"]["mean"].is_number());
    assert_eq!(run(None, Some("42"))["seed"], 42);
    assert_eq!(run(Some("7"), Some("42"))["seed"], 7);
    let reps = fs::read_to_string(dir.path().join("small.reps.csv")).unwrap();
    assert_eq!(reps.lines().count(), 5);

    fs::write(&cfg, "model = 4\n").unwrap();
    let out = npcpt(&["bench", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1, 2, 3"));
    fs::write(&cfg, "model = 1\nreps = 0\n").unwrap();
    assert_eq!(npcpt(&["bench", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn packaged_configs_parse() {
    for f in ["model1.conf", "screening.conf"] {
        let text = fs::read_to_string(data(f)).unwrap();
        npcpt_cli::bench::parse_bench_config(&text).unwrap();
    }
}

#[test]
fn crops_with_logn_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let p = data("data.csv");
    let out = npcpt(&["detect", "--crops", "logn", "10logn", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    check_elbow_csv(&fs::read_to_string(dir.path().join("data.elbow.csv")).unwrap()).unwrap();
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("data.path.json")).unwrap()).unwrap();
    let entries = v["path"].as_array().unwrap();
    for (a, b) in entries.iter().zip(entries.iter().skip(1)) {
        assert_eq!(a["penalty_interval"][1], b["penalty_interval"][0]);
        assert!(a["changepoints"].as_array().unwrap().len() > b["changepoints"].as_array().unwrap().len());
    }
}
