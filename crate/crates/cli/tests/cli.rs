use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn apc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apc")).args(args).output().expect("apc runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

/// A line in 𝔽_3^2 plus one point off it.
const FF_SET: &str = "group: 3x3\n0,0\n0,1\n0,2\n1,0\n";

#[test]
fn bound_prints_both_curves() {
    let o = apc(&["bound", "--n", "1e6", "--c", "0.5"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 1e6);
    assert!(v["cyclic"].as_f64().unwrap() > 0.0);
    assert!(v["finite_field"].as_f64().unwrap() > 0.0);
}

#[test]
fn ff_pipeline_completes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let set = write(dir.path(), "a.txt", FF_SET);
    let run = || apc(&["pipeline", "--mode", "ff", "--group", "3^2", "--set", &set]);
    let (first, second) = (run(), run());
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, second.stdout);
    let trace: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert!(!trace["steps"].as_array().unwrap().is_empty());
}

#[test]
fn pipeline_writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let set = write(dir.path(), "a.txt", FF_SET);
    let out = dir.path().join("trace.json");
    let o = apc(&["pipeline", "--mode", "ff", "--group", "3^2", "--set", &set, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let _: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
}

#[test]
fn group_mismatch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let set = write(dir.path(), "a.txt", FF_SET);
    let o = apc(&["pipeline", "--mode", "ff", "--group", "3^3", "--set", &set]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not match"));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_residue = write(dir.path(), "b.txt", "group: 3x3\n0,5\n");
    let no_header = write(dir.path(), "c.txt", "0,1\n");
    let bad_config = write(dir.path(), "cfg.json", "{ not json");
    let good = write(dir.path(), "a.txt", FF_SET);
    for args in [
        vec!["pipeline", "--mode", "ff", "--group", "3^2", "--set", &bad_residue],
        vec!["pipeline", "--mode", "ff", "--group", "3^2", "--set", &no_header],
        vec!["pipeline", "--mode", "ff", "--group", "3^2", "--set", &good, "--config", &bad_config],
        vec!["pipeline", "--mode", "ff", "--group", "3^2", "--set", "/nonexistent/set.txt"],
        vec!["search", "--n", "5", "--group", "7"],
        vec!["search"],
        vec!["frobnicate"],
    ] {
        let o = apc(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn search_reports_exact_maxima() {
    let o = apc(&["search", "--n", "10"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["size"], 5);
    assert_eq!(v["result"]["exact"], true);

    let o = apc(&["search", "--group", "3^2"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["size"], 4);
}

#[test]
fn exhausted_search_budget_exits_3() {
    let o = apc(&["search", "--n", "60", "--budget", "10"]);
    assert_eq!(code(&o), 3);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["exact"], false);
}

#[test]
fn increment_oracle_finds_the_full_line() {
    let dir = tempfile::tempdir().unwrap();
    let set = write(dir.path(), "a.txt", FF_SET);
    let o = apc(&["oracle", "increment", "--set", &set, "--codim", "1"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["best"]["density"], 1.0);
}

#[test]
fn verify_suites_pass_and_repeat() {
    let a = apc(&["verify", "--suite", "all", "--seed", "3", "--size-cap", "81"]);
    let b = apc(&["verify", "--suite", "all", "--seed", "3", "--size-cap", "81"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).lines().filter(|l| l.starts_with("PASS")).count(), 5);
}
