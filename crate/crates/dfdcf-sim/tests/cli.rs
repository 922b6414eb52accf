//! Black-box tests of the command-line binary.

use std::path::Path;
use std::process::Command;

use dfdcf_sim::engine::{Dur, SimTime};
use dfdcf_sim::scenario::Scenario;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dfdcf-sim"))
}

/// A fast variant of udp3 written to disk as a config file.
fn short_scenario_file(dir: &Path) -> std::path::PathBuf {
    let mut sc = Scenario::builtin("udp3").unwrap();
    for (i, f) in sc.flows.iter_mut().enumerate() {
        f.start = SimTime::from_secs(i as u64);
    }
    sc.duration = Dur::from_secs(6);
    let path = dir.join("short.cfg");
    std::fs::write(&path, sc.to_config_string()).unwrap();
    path
}

#[test]
fn run_twice_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_scenario_file(tmp.path());
    for out in ["a", "b"] {
        let status = bin()
            .args(["run", "--scenario"])
            .arg(&cfg)
            .args(["--method", "dfdcf", "--seed", "42", "--out"])
            .arg(tmp.path().join(out))
            .status()
            .unwrap();
        assert!(status.success());
    }
    for file in ["timeseries.csv", "summary.csv", "manifest.json"] {
        let a = std::fs::read(tmp.path().join("a").join(file)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
        assert!(!a.is_empty());
    }
}

#[test]
fn unknown_method_exits_1_listing_choices() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--scenario", "udp3", "--method", "edcf", "--out"])
        .arg(tmp.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("dcf") && err.contains("dfdcf"), "stderr: {err}");
}

#[test]
fn compare_rejects_single_method() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["compare", "--scenario", "udp3", "--methods", "dfdcf", "--out"])
        .arg(tmp.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_rejects_duplicate_seeds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["sweep", "--scenario", "udp3", "--method", "dfdcf", "--seeds", "1,2,1", "--out"])
        .arg(tmp.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_writes_one_directory_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_scenario_file(tmp.path());
    let out_dir = tmp.path().join("sweep");
    let status = bin()
        .args(["sweep", "--scenario"])
        .arg(&cfg)
        .args(["--method", "difs", "--seeds", "7,8,9", "--jobs", "2", "--out"])
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    for seed in [7, 8, 9] {
        assert!(out_dir.join(format!("seed-{seed}")).join("summary.csv").exists());
    }
}

#[test]
fn compare_then_report_produces_panels() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_scenario_file(tmp.path());
    let cmp_dir = tmp.path().join("cmp");
    let status = bin()
        .args(["compare", "--scenario"])
        .arg(&cfg)
        .args(["--methods", "difs,dfdcf", "--seed", "5", "--out"])
        .arg(&cmp_dir)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(cmp_dir.join("compare.csv").exists());
    let head = std::fs::read_to_string(cmp_dir.join("compare.csv")).unwrap();
    assert!(head.starts_with("method,flow,"));

    let charts = tmp.path().join("charts");
    let status = bin()
        .args(["report", "--input"])
        .arg(cmp_dir.join("difs/timeseries.csv"))
        .arg(cmp_dir.join("dfdcf/timeseries.csv"))
        .arg("--out")
        .arg(&charts)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(charts.join("difs/delay_ms.svg").exists());
    assert!(charts.join("dfdcf/delay_ms.svg").exists());
    let panels = std::fs::read_to_string(charts.join("delay_ms-panels.svg")).unwrap();
    assert!(panels.contains("(a) difs") && panels.contains("(b) dfdcf"));
}

#[test]
fn report_rejects_malformed_csv_with_row_context() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "time_s,flow,metric,value\n1.0,only,three\n").unwrap();
    let out = bin()
        .args(["report", "--input"])
        .arg(&bad)
        .arg("--out")
        .arg(tmp.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn list_scenarios_names_all_builtins() {
    let out = bin().arg("list-scenarios").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["udp3", "tcp3-naive", "tcp3", "mixed"] {
        assert!(text.contains(name), "missing {name} in: {text}");
    }
}
