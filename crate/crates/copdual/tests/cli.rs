//! End-to-end checks of the command-line surface: exit codes, report
//! shape, and argument validation.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_copdual"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is valid JSON")
}

#[test]
fn copositive_system_exits_zero_with_zero_set() {
    let f = fixture("ex2.json");
    let out = run(&["check-copositive", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["copositive"], serde_json::json!(true));
    assert!(v["zero_set"].is_array());
}

#[test]
fn non_copositive_point_exits_one_with_witness() {
    let f = fixture("ex1.json");
    let out = run(&["check-copositive", f.to_str().unwrap(), "--x", "1,1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["copositive"], serde_json::json!(false));
    let min = v["minimum"].as_str().unwrap();
    assert!(min.starts_with('-'), "witness minimum must be negative");
    assert_eq!(v["witness"]["value"], v["minimum"]);
}

#[test]
fn analyze_exit_codes_follow_the_verdict() {
    let neg = run(&["analyze", fixture("ex1.json").to_str().unwrap()]);
    assert_eq!(neg.status.code(), Some(1));
    assert_eq!(
        stdout_json(&neg)["verdict"],
        serde_json::json!("no-uniform-duality")
    );

    let pos = run(&["analyze", fixture("ex3.json").to_str().unwrap()]);
    assert_eq!(pos.status.code(), Some(0));
    assert_eq!(
        stdout_json(&pos)["verdict"],
        serde_json::json!("uniform-duality")
    );
}

#[test]
fn gap_rejects_wrong_cost_length() {
    let out = run(&["gap", fixture("ex1.json").to_str().unwrap(), "--cost", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty(), "validation errors go to stderr");
    assert!(!out.stderr.is_empty());
}

#[test]
fn gap_reports_the_known_gap() {
    let out = run(&[
        "gap",
        fixture("ex1.json").to_str().unwrap(),
        "--cost",
        "0,-1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["gap"], serde_json::json!("1"));
    assert_eq!(v["exact"], serde_json::json!(true));
}

#[test]
fn duffin_refuses_without_uniform_duality() {
    let out = run(&["duffin", fixture("ex1.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert!(v["error"].is_string());
    assert_eq!(v["verdict"], serde_json::json!("no-uniform-duality"));
}

#[test]
fn duffin_succeeds_on_a_uniform_instance() {
    let out = run(&["duffin", fixture("ex3.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["orthogonality_ok"], serde_json::json!(true));
    assert_eq!(v["support_ok"], serde_json::json!(true));
}

#[test]
fn malformed_input_exits_two() {
    let dir = std::env::temp_dir().join("copdual-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"n\": 1}").unwrap();
    let out = run(&["immobile", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn text_mode_renders_the_same_facts() {
    let out = run(&[
        "immobile",
        fixture("ex2.json").to_str().unwrap(),
        "--text",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("status: verified-exact"));
    assert!(!text.trim_start().starts_with('{'), "text mode is not JSON");
}
