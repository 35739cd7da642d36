//! End-to-end runs of the `config-ot` binary.

use std::process::Command;

use serde_json::Value;

const U01: &str = r#"{"kind":"uniform","a":0.0,"b":1.0}"#;
const U02: &str = r#"{"kind":"uniform","a":0.0,"b":2.0}"#;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_config-ot")).args(args).output().expect("spawn config-ot");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("report is JSON")
}

#[test]
fn config_dist_reports_the_matching_cost() {
    let (code, out, _) = run(&["config-dist", "--eta", r#"{"points":[[0],[1]]}"#, "--omega", r#"{"points":[[0.5],[3]]}"#]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["schema"], "config-ot/1");
    assert_eq!(v["result"]["w2"], 2.125);
    assert_eq!(v["inputs"]["eta"]["points"][1][0], 1.0);
}

#[test]
fn poisson_identity_passes_and_reports_error_bars() {
    let (code, out, _) = run(&["poisson-identity", "--sigma1", U01, "--sigma2", U02, "--samples", "100000", "--seed", "7"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["samples"], 100_000);
    let est = v["result"]["estimate"].as_f64().unwrap();
    let se = v["result"]["std_error"].as_f64().unwrap();
    assert!((est - 1.0 / 6.0).abs() <= 3.0 * se);
}

#[test]
fn count_gate_gives_infinity_in_band() {
    let p1 = r#"{"type":"poisson","mass":1.0,"density":{"kind":"uniform","a":0.0,"b":1.0}}"#;
    let p2 = r#"{"type":"poisson","mass":2.0,"density":{"kind":"uniform","a":0.0,"b":1.0}}"#;
    let (code, out, _) = run(&["process-dist", "--mu", p1, "--nu", p2]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["result"]["w2"], "inf");
    assert_eq!(v["result"]["method"], "count-gate");
}

#[test]
fn failed_identity_exits_one() {
    // one sample cannot estimate the mean within three of its own zero-width
    // error bars unless it hits it exactly
    let model = r#"{"type":"poisson","mass":1.0,"density":{"kind":"uniform","a":0.0,"b":1.0}}"#;
    let (code, out, _) = run(&["shift-bound", "--model", model, "--shift", r#"{"scale":0.0,"offset":[0.1]}"#, "--samples", "1", "--seed", "3"]);
    let v = json(&out);
    let est = v["result"]["estimate"].as_f64().unwrap();
    assert_eq!(code, if est <= 0.005 { 0 } else { 1 });
    assert_eq!(v["pass"], code == 0);
}

#[test]
fn bad_input_exits_two() {
    let (code, out, err) = run(&["config-dist", "--eta", "{oops", "--omega", r#"{"points":[]}"#]);
    assert_eq!(code, 2);
    assert!(json(&out)["error"].is_string());
    assert!(err.contains("config-ot:"));

    let (code, _, _) = run(&["config-dist", "--eta", "/no/such/file.json", "--omega", r#"{"points":[]}"#]);
    assert_eq!(code, 2);

    let (code, _, _) = run(&["barbour", "--sigma1", U01]);
    assert_eq!(code, 2);
}

#[test]
fn inputs_can_be_files_and_reports_written_to_disk() {
    let dir = tempfile::tempdir().unwrap();
    let eta = dir.path().join("eta.json");
    let report = dir.path().join("report.csv");
    std::fs::write(&eta, r#"{"points":[[0,0],[1,1]]}"#).unwrap();
    let (code, out, _) = run(&[
        "config-dist",
        "--eta",
        eta.to_str().unwrap(),
        "--omega",
        r#"{"points":[[1,1],[0,0]]}"#,
        "--format",
        "csv",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(&report).unwrap(), "key,value\nw2,0.0\n");
}

#[test]
fn csv_traces_have_running_columns() {
    let (code, out, _) = run(&["poisson-identity", "--sigma1", U01, "--sigma2", U02, "--samples", "50", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("sample,value,running_mean,running_std_error"));
    assert_eq!(lines.count(), 50);
}

#[test]
fn barbour_and_tensorization_pass() {
    let (code, out, _) = run(&["barbour", "--sigma1", U01, "--sigma2", U02]);
    assert_eq!(code, 0);
    let cf = json(&out)["result"]["closed_form"].as_f64().unwrap();
    assert!((cf - (1.0 - (-1.0f64).exp()) / 6.0).abs() < 1e-6);

    let (code, out, _) = run(&["tensorization", "--sigma1", U01, "--sigma2", U02, "--samples", "200", "--seed", "2"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(json(&out)["result"]["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn sample_is_reproducible() {
    let model = r#"{"type":"binomial","n":3,"density":{"kind":"uniform","a":0.0,"b":1.0}}"#;
    let a = run(&["sample", "--model", model, "--samples", "4", "--seed", "1"]);
    let b = run(&["sample", "--model", model, "--samples", "4", "--seed", "1"]);
    assert_eq!(a, b);
    assert_eq!(json(&a.1)["result"]["counts"], serde_json::json!([3, 3, 3, 3]));
}
