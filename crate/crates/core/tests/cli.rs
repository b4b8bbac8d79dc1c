use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn dsl(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dsl")).args(args).env("DSL_NO_COLOR", "1").output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn scenario_file_passes() {
    let (code, out, _) = dsl(&["verify", "--corpus", &fixture("pass.json"), "--seed", "3"]);
    assert_eq!(code, 0);
    let lines: Vec<Value> = out.lines().map(json).collect();
    assert!(lines.iter().all(|l| l["pass"] == true && l["seed"] == 3));
    assert!(lines.iter().any(|l| l["kind"] == "roundtrip"));
}

#[test]
fn unknown_scenario_key_is_named() {
    let (code, out, err) = dsl(&["verify", "--corpus", &fixture("unknown_key.json")]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("tolerance"), "{err}");
}

#[test]
fn recover_atomic_tuple_certifies() {
    let (code, out, _) = dsl(&["recover", "--tuple", &fixture("tuple_atomic.json")]);
    assert_eq!(code, 0);
    let cert = json(&out);
    assert_eq!(cert["pass"], true);
    assert_eq!(cert["m"], 3);
    assert!(cert["maxGramDeviation"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn recover_jordan_reports_diagnostics() {
    let (code, out, _) = dsl(&["recover", "--operator", &fixture("jordan.json")]);
    let cert = json(&out);
    assert_eq!(code, 2);
    assert_eq!(cert["pass"], false);
    let diags: Vec<&str> = cert["diagnostics"].as_array().unwrap().iter().map(|d| d.as_str().unwrap()).collect();
    assert!(diags.iter().any(|d| d.starts_with("InfeasibleSequence") || d.starts_with("DiagonalInconsistent")));
}

#[test]
fn recover_missing_file_fails() {
    let (code, out, _) = dsl(&["recover", "--tuple", &fixture("absent.json")]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
}

#[test]
fn classify_examples() {
    let (code, out, _) = dsl(&["classify", "--operator", &fixture("jordan.json")]);
    assert_eq!((code, json(&out)["isometric_order"].as_u64()), (0, Some(3)));
    let (code, out, _) = dsl(&["classify", "--operator", &fixture("unitary.json")]);
    assert_eq!((code, json(&out)["isometric_order"].as_u64()), (0, Some(1)));
    let (code, out, _) = dsl(&["classify", "--operator", &fixture("scaled_jordan.json"), "--cap", "3", "--output", "text"]);
    assert_eq!(code, 0);
    assert!(out.contains("isometric_order=none ≤ 3"), "{out}");
}

#[test]
fn text_output_respects_no_color() {
    let (_, plain, _) = dsl(&["verify", "--corpus", &fixture("pass.json"), "--output", "text"]);
    assert!(plain.starts_with("PASS ") && !plain.contains('\x1b'));
    let out = Command::new(env!("CARGO_BIN_EXE_dsl"))
        .args(["verify", "--corpus", &fixture("pass.json"), "--output", "text"])
        .env_remove("DSL_NO_COLOR")
        .output()
        .unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("\x1b[32mPASS"));
}

#[test]
fn out_file_is_written_only_on_success() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.jsonl");
    let path = target.to_str().unwrap();
    let (code, out, _) = dsl(&["verify", "--corpus", &fixture("pass.json"), "--out", path]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let first = std::fs::read(&target).unwrap();
    assert!(!first.is_empty());
    let (code, _, _) = dsl(&["verify", "--corpus", &fixture("bad.json"), "--out", path]);
    assert_eq!(code, 1);
    assert_eq!(std::fs::read(&target).unwrap(), first);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn gram_and_wold_commands() {
    let (code, out, _) = dsl(&["gram", "--tuple", &fixture("tuple_atomic.json"), "--degree", "3"]);
    let g = json(&out);
    assert_eq!((code, g["d"].as_u64(), g["dimE"].as_u64()), (0, Some(3), Some(2)));
    assert_eq!(g["matrix"].as_array().unwrap().len(), 8);
    let (code, out, _) = dsl(&["wold", "--operator", &fixture("unitary.json")]);
    assert_eq!((code, &json(&out)["pass"]), (0, &Value::Bool(true)));
}

#[test]
fn quadrature_command_near_the_boundary() {
    let (code, out, _) = dsl(&[
        "quadrature", "--measure", &fixture("measure.json"), "--polynomial", &fixture("polynomial.json"),
        "--radius", "0.999", "--order", "1",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(json(&out)["residual"].as_f64().unwrap() <= 1e-3);
}
