//! End-to-end runs of the `gausskit` binary.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gausskit"))
}

fn write_file(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

const SQUEEZED: &str = r#"{"mu": [[0, 0]], "A": [[[0.3, 0]]], "Lambda": [[[0, 0]]]}"#;
const PAIR: &str = r#"{"mu": [[0, 0], [0, 0]], "A": [[[0, 0], [0.35, 0]], [[0.35, 0], [0, 0]]], "Lambda": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]}"#;
const MIXED: &str = r#"{"n": 2, "mu": [[0.1, 0], [0, -0.05]], "A": [[[0, 0], [0.2, 0]], [[0.2, 0], [0, 0]]], "Lambda": [[[0.1, 0], [0, 0]], [[0, 0], [0.1, 0]]]}"#;

#[test]
fn validate_reports_and_rejects() {
    let good = write_file("validate_good.json", SQUEEZED);
    let report = stdout_json(&run(&["validate", "--state", good.to_str().unwrap()]));
    assert_eq!(report["valid"], Value::Bool(true));
    assert_eq!(report["pure"], Value::Bool(true));
    assert!((report["trace"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let bad = write_file(
        "validate_bad.json",
        r#"{"c": [1, 0], "mu": [[0, 0]], "A": [[[0.6, 0]]], "Lambda": [[[0, 0]]]}"#,
    );
    let out = run(&["validate", "--state", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["valid"], Value::Bool(false));
    assert!(report["min_eig_M"].as_f64().unwrap() < 0.0);
}

#[test]
fn usage_errors_exit_with_one() {
    let malformed = write_file("malformed.json", r#"{"mu": [[0, 0]], "A": [[[0.3, 0]]]"#);
    let out = run(&["validate", "--state", malformed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let asymmetric = write_file(
        "asymmetric.json",
        r#"{"mu": [[0, 0], [0, 0]], "A": [[[0, 0], [0.1, 0]], [[0.2, 0], [0, 0]]], "Lambda": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]}"#,
    );
    assert_eq!(run(&["validate", "--state", asymmetric.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["dmf", "--state", "/nonexistent/state.json"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    let pair = write_file("usage_pair.json", PAIR);
    assert_eq!(run(&["marginal", "--state", pair.to_str().unwrap(), "--split", "0"]).status.code(), Some(1));
    assert_eq!(run(&["charfn", "--state", pair.to_str().unwrap(), "--z", "0.1,0.2"]).status.code(), Some(1));
}

#[test]
fn convert_round_trip() {
    let mixed = write_file("convert_mixed.json", MIXED);
    let cov = run(&["convert", "--state", mixed.to_str().unwrap()]);
    let cov_json = stdout_json(&cov);
    assert!(cov_json.get("S").is_some());
    let cov_path = write_file("convert_cov.json", std::str::from_utf8(&cov.stdout).unwrap());
    let back = stdout_json(&run(&["convert", "--state", cov_path.to_str().unwrap()]));
    let original: Value = serde_json::from_str(MIXED).unwrap();
    for key in ["A", "Lambda"] {
        for i in 0..2 {
            for j in 0..2 {
                let (re, im) = complex(&back[key][i][j]);
                let (re0, im0) = complex(&original[key][i][j]);
                assert!((re - re0).abs() < 1e-12 && (im - im0).abs() < 1e-12, "{key}[{i}][{j}]");
            }
        }
    }
    let (re, im) = complex(&back["mu"][1]);
    assert!(re.abs() < 1e-12 && (im + 0.05).abs() < 1e-12);
}

#[test]
fn density_matrix_outputs() {
    let sq = write_file("dmf_squeezed.json", SQUEEZED);
    let json = stdout_json(&run(&["dmf", "--state", sq.to_str().unwrap(), "--cutoff", "6"]));
    assert_eq!(json["n"], 1);
    assert_eq!(json["index"].as_array().unwrap().len(), 7);
    let (p0, _) = complex(&json["entries"][0][0]);
    assert!((p0 - 0.8).abs() < 1e-14);
    let (p1, _) = complex(&json["entries"][1][1]);
    assert_eq!(p1, 0.0);
    assert!(json["tail"]["deficit"].as_f64().unwrap() > 0.0);

    let out = run(&["dmf", "--state", sq.to_str().unwrap(), "--cutoff", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,tp,re,im"));
    assert_eq!(lines.count(), 9);
    assert!(text.contains("(0),(0),8.0000000000000004e-1") || text.contains("(0),(0),8.0000000000000000e-1"));
}

#[test]
fn state_vector_of_pair() {
    let pair = write_file("statevec_pair.json", PAIR);
    let json = stdout_json(&run(&["statevec", "--state", pair.to_str().unwrap(), "--cutoff", "4"]));
    let index = json["index"].as_array().unwrap();
    let beta: f64 = 0.35;
    let root = (1.0 - 4.0 * beta * beta).sqrt();
    for (t, z) in index.iter().zip(json["entries"].as_array().unwrap()) {
        let (t0, t1) = (t[0].as_u64().unwrap(), t[1].as_u64().unwrap());
        let (re, im) = complex(z);
        let expected = if t0 == t1 { root * (2.0 * beta).powi(t0 as i32) } else { 0.0 };
        assert!((re - expected).abs() < 1e-14 && im == 0.0, "{t}");
    }
    let mixed = write_file("statevec_mixed.json", MIXED);
    assert_eq!(run(&["statevec", "--state", mixed.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn marginal_of_pair_is_thermal() {
    let pair = write_file("marginal_pair.json", PAIR);
    let json = stdout_json(&run(&["marginal", "--state", pair.to_str().unwrap(), "--split", "2"]));
    let (lambda, _) = complex(&json["Lambda"][0][0]);
    assert!((lambda - 4.0 * 0.35 * 0.35).abs() < 1e-10);
    let (a, _) = complex(&json["A"][0][0]);
    assert!(a.abs() < 1e-12);
}

#[test]
fn entanglement_reports() {
    let pair = write_file("ent_pair.json", PAIR);
    let json = stdout_json(&run(&["entanglement", "--state", pair.to_str().unwrap()]));
    assert_eq!(json["completely_entangled"], Value::Bool(true));
    assert_eq!(json["splits"]["1|2"]["separable"], Value::Bool(false));
    let sq = write_file("ent_product.json", r#"{"mu": [[0, 0], [0, 0]], "A": [[[0.3, 0], [0, 0]], [[0, 0], [0.1, 0]]], "Lambda": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]}"#);
    let json = stdout_json(&run(&["entanglement", "--state", sq.to_str().unwrap(), "--split", "1"]));
    assert_eq!(json["splits"]["1|2"]["separable"], Value::Bool(true));
    assert_eq!(json["completely_entangled"], Value::Bool(false));
    let mixed = write_file("ent_mixed.json", MIXED);
    assert_eq!(run(&["entanglement", "--state", mixed.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn characteristic_function_of_vacuum() {
    let vac = write_file("charfn_vac.json", r#"{"mu": [[0, 0]], "A": [[[0, 0]]], "Lambda": [[[0, 0]]]}"#);
    let json = stdout_json(&run(&["charfn", "--state", vac.to_str().unwrap(), "--z", "0.3,0.4"]));
    let (re, im) = complex(&json["value"]);
    assert!((re - (-0.125f64).exp()).abs() < 1e-15 && im.abs() < 1e-15);
}

#[test]
fn tomography_pipeline_is_deterministic() {
    let mixed = write_file("tomo_mixed.json", MIXED);
    let args = ["tomo-simulate", "--state", mixed.to_str().unwrap(), "--shots", "200000", "--seed", "11"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let records: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(records["measurements"].as_array().unwrap().len(), 1 + 4 + 6 + 2 + 1);

    let mut child = bin()
        .args(["tomo-estimate"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&first.stdout).unwrap();
    let report = stdout_json(&child.wait_with_output().unwrap());
    let (a12, _) = complex(&report["estimates"]["A"][0][1]);
    let se = report["stderr"]["A[1,2].re"].as_f64().unwrap();
    assert!((a12 - 0.2).abs() < 5.0 * se, "{a12} ± {se}");
    assert!(report["unidentified"].as_array().unwrap().is_empty());

    let standard = run(&["tomo-simulate", "--state", mixed.to_str().unwrap(), "--shots", "1000", "--battery", "standard"]);
    let records: Value = serde_json::from_slice(&standard.stdout).unwrap();
    assert_eq!(records["measurements"].as_array().unwrap().len(), 1 + 4 + 6 + 1);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let mixed = write_file("bytes_mixed.json", MIXED);
    for args in [
        vec!["dmf", "--state", mixed.to_str().unwrap(), "--cutoff", "5"],
        vec!["convert", "--state", mixed.to_str().unwrap()],
        vec!["dmf", "--state", mixed.to_str().unwrap(), "--cutoff", "4", "--format", "csv"],
    ] {
        assert_eq!(run(&args).stdout, run(&args).stdout);
    }
}
