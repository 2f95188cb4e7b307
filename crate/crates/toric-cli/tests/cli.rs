//! End-to-end runs of the binary: exit codes, JSON shapes, and
//! determinism of the report stream.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toric"))
}

fn write_tmp(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const P2: &str = r#"{"rank":2,"rays":[[1,0],[0,1],[-1,-1]],"max_cones":[[0,1],[0,2],[1,2]]}"#;
const A2: &str = r#"{"rank":2,"rays":[[1,0],[0,1]],"max_cones":[[0,1]]}"#;

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn fan_check_reports_completeness() {
    let dir = tempfile::tempdir().unwrap();
    let fan = write_tmp(&dir, "p2.json", P2);
    let out = bin().args(["fan", "check", "--fan"]).arg(&fan).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["complete"], true);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn fan_describe_p2_is_smooth() {
    let dir = tempfile::tempdir().unwrap();
    let fan = write_tmp(&dir, "p2.json", P2);
    let out = bin().args(["fan", "describe", "--fan"]).arg(&fan).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rank"], 2);
    assert_eq!(v["predicates"]["is_smooth"], true);
    assert_eq!(v["predicates"]["has_ample"], true);
}

#[test]
fn cohomology_canonical_of_p2() {
    let dir = tempfile::tempdir().unwrap();
    let fan = write_tmp(&dir, "p2.json", P2);
    let out = bin()
        .args(["cohomology", "compute", "--fan"])
        .arg(&fan)
        .args(["--sheaf", r#"{"reflexive_div":{"coeffs":["-1","-1","-1"]}}"#])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["h"], serde_json::json!([0, 0, 1]));
}

#[test]
fn cohomology_log_forms_hodge_number() {
    let dir = tempfile::tempdir().unwrap();
    let fan = write_tmp(&dir, "p2.json", P2);
    let out = bin()
        .args(["cohomology", "compute", "--fan"])
        .arg(&fan)
        .args(["--sheaf", r#"{"log_forms":{"a":1,"B":[],"G":{"coeffs":["0","0","0"]}}}"#])
        .args(["--field", "F3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["h"], serde_json::json!([0, 1, 0]));
    assert_eq!(v["field"], "F3");
}

#[test]
fn cohomology_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let fan = write_tmp(&dir, "p2.json", P2);
    let out = bin()
        .args(["cohomology", "compute", "--fan"])
        .arg(&fan)
        .args(["--sheaf", r#"{"reflexive_div":{"coeffs":["1","1","1"]}}"#])
        .args(["--out", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out), "i,h\n0,10\n1,0\n2,0\n");
}

#[test]
fn incomplete_fan_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let fan = write_tmp(&dir, "a2.json", A2);
    let out = bin()
        .args(["cohomology", "compute", "--fan"])
        .arg(&fan)
        .args(["--sheaf", r#"{"reflexive_div":{"coeffs":["0","0"]}}"#])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("fan is not complete"), "{err}");
}

#[test]
fn malformed_sheaf_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let fan = write_tmp(&dir, "p2.json", P2);
    let out = bin()
        .args(["cohomology", "compute", "--fan"])
        .arg(&fan)
        .args(["--sheaf", r#"{"not_a_sheaf":1}"#])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_regression_holds() {
    let out = bin().args(["verify", "regression"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(v["tables"][0]["h"], serde_json::json!([0, 1, 0]));
}

#[test]
fn verify_kodaira_over_small_corpus() {
    let out = bin()
        .args(["verify", "theorem", "kodaira", "--corpus", "1,5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    let v: serde_json::Value = serde_json::from_str(last).unwrap();
    assert_eq!(v["falsified"], 0);
}

#[test]
fn verify_output_is_independent_of_jobs() {
    let run = |jobs: &str| {
        let out = bin()
            .args(["verify", "theorem", "all", "--corpus", "2,3", "--field", "Q", "--jobs", jobs])
            .output()
            .unwrap();
        (out.status.code(), stdout(&out))
    };
    let a = run("1");
    let b = run("4");
    assert_eq!(a, b);
}

#[test]
fn verify_unknown_theorem_is_an_input_error() {
    let out = bin()
        .args(["verify", "theorem", "nope", "--corpus", "1,1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_malformed_instance_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_tmp(&dir, "inst.json", "{nope");
    let out = bin()
        .args(["verify", "theorem", "kodaira", "--instance"])
        .arg(&inst)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corpus_generate_is_byte_identical() {
    let run = || {
        let out = bin()
            .args(["corpus", "generate", "--seed", "7", "--size", "4"])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn corpus_roundtrips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_path = dir.path().join("c.jsonl");
    let out = bin()
        .args(["corpus", "generate", "--seed", "3", "--size", "2", "--output"])
        .arg(&corpus_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = bin()
        .args(["verify", "theorem", "bott", "--instance"])
        .arg(&corpus_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3); // 2 reports + summary
}
