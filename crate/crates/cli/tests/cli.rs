use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn ylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ylab"))
        .args(args)
        .env_remove("YLAB_EPS")
        .output()
        .expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn data(name: &str) -> String {
    format!("{}/../core/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn generate_solve_verify() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "m.json");
    let tour = path(&dir, "t.json");
    let svg = path(&dir, "t.svg");
    let trace = path(&dir, "trace.json");
    assert!(ylab(&["generate", "maxmin-counterexample", "--out", s(&inst)]).status.success());
    let out = ylab(&["solve", s(&inst), "--out", s(&tour), "--svg", s(&svg), "--trace", s(&trace)]);
    assert!(out.status.success());
    assert!(out.stderr.is_empty(), "no ties on the fixture");
    let tf: serde_json::Value = serde_json::from_str(&fs::read_to_string(&tour).unwrap()).unwrap();
    assert_eq!(tf["order"], serde_json::json!([0, 1, 3, 2]));
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let tr: serde_json::Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(tr["format"], "ylab-run-trace");

    let out = ylab(&["verify", s(&inst), s(&tour), "--oracle", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["valid"], true);
    assert_eq!(rep["crossings"], 1);
    assert!(rep["gap"].as_f64().unwrap() > 1e-6);
}

#[test]
fn invalid_tour_exits_1() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "g.json");
    let tour = path(&dir, "bad.json");
    assert!(ylab(&["generate", "grid", "2", "--out", s(&inst)]).status.success());
    fs::write(&tour, r#"{"instance_name": "grid-2", "order": [0, 1, 1], "length": 0}"#).unwrap();
    let out = ylab(&["verify", s(&inst), s(&tour)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("valid      false"));
}

#[test]
fn bad_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let junk = path(&dir, "junk.json");
    fs::write(&junk, "{ not json").unwrap();
    assert_eq!(ylab(&["solve", s(&junk)]).status.code(), Some(2));
    assert_eq!(ylab(&["solve", s(&path(&dir, "missing.json"))]).status.code(), Some(2));
    assert_eq!(ylab(&["generate", "no-such-fixture"]).status.code(), Some(2));
    assert_eq!(ylab(&["generate", "grid", "1"]).status.code(), Some(2));
    assert_eq!(ylab(&["experiment", "--n", "2"]).status.code(), Some(2));
    assert_eq!(ylab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn solver_limits_exit_3() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "r.json");
    let tour = path(&dir, "t.json");
    assert!(ylab(&["generate", "random", "30", "1", "--out", s(&inst)]).status.success());
    assert!(ylab(&["solve", s(&inst), "--out", s(&tour)]).status.success());
    assert_eq!(ylab(&["verify", s(&inst), s(&tour), "--oracle"]).status.code(), Some(3));
}

#[test]
fn ties_are_reported_on_stderr() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "g.json");
    assert!(ylab(&["generate", "grid", "3", "--out", s(&inst)]).status.success());
    let out = ylab(&["solve", s(&inst)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn enumerate_json_and_table() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "g.json");
    let json = path(&dir, "rep.json");
    assert!(ylab(&["generate", "grid", "2", "--out", s(&inst)]).status.success());
    let out = ylab(&["enumerate", s(&inst), "--json", s(&json)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("root branches          4"));
    let rep: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(rep["nodes_per_depth"][1], 4);
    let out = ylab(&["enumerate", s(&inst), "--json", "-", "--max-nodes", "3"]);
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["truncated"], true);
}

#[test]
fn eps_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "g.json");
    assert!(ylab(&["generate", "grid", "2", "--out", s(&inst)]).status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_ylab"))
        .args(["enumerate", s(&inst), "--json", "-"])
        .env("YLAB_EPS", "0.25")
        .output()
        .unwrap();
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["eps"], 0.25);
}

#[test]
fn tsplib_round_trip_through_the_cli() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "m.tsp");
    let tour = path(&dir, "m.tour");
    assert!(ylab(&["generate", "unit-square", "--format", "tsplib", "--out", s(&inst)]).status.success());
    assert!(fs::read_to_string(&inst).unwrap().contains("NODE_COORD_SECTION"));
    assert!(ylab(&["solve", s(&inst), "--format", "tsplib", "--out", s(&tour)]).status.success());
    assert!(fs::read_to_string(&tour).unwrap().contains("TOUR_SECTION"));
    assert!(ylab(&["verify", s(&inst), s(&tour)]).status.success());
}

#[test]
fn pcb442_published_tour_verifies() {
    let out = ylab(&["verify", &data("pcb442.tsp"), &data("pcb442.opt.tour"), "--known-optimal", "50778", "--json"]);
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["length"], 50778.0);
    assert_eq!(rep["gap"], 0.0);
}

#[test]
fn experiment_csv() {
    let out = ylab(&["experiment", "--n", "10,20", "--trials", "4", "--seed", "9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,trials,with_crossings,rate,mean_uncross_improvement,seed"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn correspond_reports_both_variants() {
    let dir = TempDir::new().unwrap();
    let inst = path(&dir, "m.json");
    assert!(ylab(&["generate", "maxmin-counterexample", "--out", s(&inst)]).status.success());
    let out = ylab(&["correspond", s(&inst)]);
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["maxmin"]["orders_match"], false);
    assert!(rep["minmin"].is_object());
}
