//! End-to-end runs of the `carplan` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn carplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carplan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn plan_writes_record_trajectory_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = carplan(&["plan", s(&scenario("straight.json")), "-o", s(dir.path()), "--svg", "--discs"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["record.json", "trajectory.json", "plan.svg"] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("record.json")).unwrap()).unwrap();
    assert_eq!(record["record"]["success"], true);
    assert!(std::fs::read_to_string(dir.path().join("plan.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn render_redraws_a_saved_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let corridor = scenario("corridor.json");
    let out = carplan(&["plan", s(&corridor), "-o", s(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = dir.path().join("nested/render.svg");
    let traj = dir.path().join("trajectory.json");
    let out = carplan(&["render", s(&traj), s(&corridor), "-o", s(&svg), "--discs"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(svg).unwrap().contains("<polyline"));
}

#[test]
fn missing_goal_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"start": {"x": 0, "y": 0, "theta": 0}}"#).unwrap();
    let out = carplan(&["plan", s(&bad), "-o", s(&dir.path().join("out"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("goal"));
}

#[test]
fn unknown_zone_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = carplan(&["plan", s(&scenario("straight.json")), "-o", s(dir.path()), "--zones", "z9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreadable_scenario_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = carplan(&["plan", s(&dir.path().join("absent.json")), "-o", s(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bench_writes_records_timings_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = carplan(&["bench", "-n", "3", "--seed", "5", "-o", s(dir.path()), "--jobs", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records = std::fs::read_to_string(dir.path().join("records.csv")).unwrap();
    assert_eq!(records.lines().count(), 4, "header plus one row per run");
    assert!(dir.path().join("timings.csv").is_file());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["count"], 3);
}

#[test]
fn zero_run_bench_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = carplan(&["bench", "-n", "0", "-o", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}
