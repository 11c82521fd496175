//! End-to-end checks of the `amou` binary: exit codes, report shape,
//! the frozen diag(1, 1/2) counterexample, and report determinism.

use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_amou");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

const X_HALF: &str =
    r#"{"level":[1,1],"blocks":[[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]]]}"#;

#[test]
fn axioms_pass_on_m2() {
    let out = run(&["axioms", "--space", r#"{"summands":[2]}"#, "--samples", "60"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&out);
    assert_eq!(rep["passed"], serde_json::Value::Bool(true));
    assert!(rep["suites"].as_array().unwrap().len() > 5);
}

#[test]
fn oup_failure_reports_flip_counterexample() {
    let out = run(&["oup", "--space", r#"{"summands":[2]}"#, "--x", X_HALF]);
    assert_eq!(out.status.code(), Some(1));
    let rep = report(&out);
    assert_eq!(rep["passed"], serde_json::Value::Bool(false));
    let ce = rep["suites"]
        .as_array()
        .unwrap()
        .iter()
        .find_map(|s| s.get("counterexample").filter(|c| !c.is_null()))
        .expect("a counterexample is reported");
    // The refuting witness is the flip matrix, margin −1/2.
    let y = &ce["inputs"]["y"]["blocks"][0];
    assert_eq!(y[0][1][0], serde_json::json!(1.0));
    assert_eq!(y[1][0][0], serde_json::json!(1.0));
    assert_eq!(y[0][0][0], serde_json::json!(0.0));
    let margin = ce["margin"].as_f64().unwrap();
    assert!((margin + 0.5).abs() < 1e-9);
}

#[test]
fn invalid_input_is_exit_code_two() {
    for args in [
        vec!["axioms", "--space", "not json"],
        vec!["axioms", "--space", r#"{"summands":[]}"#],
        vec!["oup", "--space", r#"{"summands":[2]}"#, "--x", "{}"],
        vec!["quotient", "--hom", r#"{"bogus":true}"#],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "args: {args:?}");
    }
}

#[test]
fn oversized_request_is_rejected() {
    let out = run(&["axioms", "--space", r#"{"summands":[200]}"#, "--levels", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_modulo_timestamp() {
    let args = [
        "suite",
        "--space",
        r#"{"summands":[2,1]}"#,
        "--samples",
        "30",
        "--seed",
        "5",
    ];
    let mut a = report(&run(&args));
    let mut b = report(&run(&args));
    a.as_object_mut().unwrap().remove("timestamp");
    b.as_object_mut().unwrap().remove("timestamp");
    assert_eq!(a, b);
    // Suites come back sorted by name.
    let names: Vec<&str> = a["suites"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn seed_changes_sampled_margins() {
    let base = [
        "axioms",
        "--space",
        r#"{"summands":[2]}"#,
        "--samples",
        "40",
    ];
    let a = report(&run(&base));
    let mut with_seed = base.to_vec();
    with_seed.extend(["--seed", "9"]);
    let b = report(&run(&with_seed));
    assert_eq!(a["passed"], b["passed"]);
    assert_ne!(a["seed"], b["seed"]);
}

#[test]
fn out_flag_writes_report_file() {
    let dir = std::env::temp_dir().join(format!("amou-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = run(&[
        "axioms",
        "--space",
        r#"{"summands":[2]}"#,
        "--samples",
        "20",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(rep["passed"], serde_json::Value::Bool(true));
    std::fs::remove_dir_all(&dir).ok();
}
