use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn data_file(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    p.to_str().unwrap().to_string()
}

fn mrkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrkit")).args(args).output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn omega_for_data2() {
    let out = mrkit(&["omega", "--data", &data_file("DATA2.json"), "--imax", "0", "--jmax", "0", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out), json!({"(0,0)": {"X^0": "1", "X^2": "-1"}}));
}

#[test]
fn symbolic_resolvent_needs_no_data() {
    let out = mrkit(&["resolvent", "--symbolic", "--order", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["B"][0], json!([{"monomial": [["q", 0, 1]], "coeff": {"ε^0": "1"}}]));
    assert_eq!(v["A"][1], json!([{"monomial": [["q", 0, 1], ["r", 0, 1]], "coeff": {"ε^0": "1/2"}}]));
}

#[test]
fn npoint_reports_agreement() {
    let out = mrkit(&["npoint", "--data", &data_file("DATA1.json"), "--k", "2", "--imax", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["agree"], json!(true));
    assert_eq!(v["mr"]["(0,0)"], json!({"X^0": "1"}));
    assert_eq!(v["mr"], v["wave"]);
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flows.json");
    let out = mrkit(&["flows", "--order", "0", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["0"]["q"], json!([{"monomial": [["q", 1, 1]], "coeff": {"ε^0": "1"}}]));
}

#[test]
fn task_list_runs_without_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(
        &path,
        r#"{"q": [[0, 0, "1"]], "r": [[0, 0, "1"]], "output": "json", "tasks": [{"task": "omega", "imax": 0, "jmax": 0}]}"#,
    )
    .unwrap();
    let out = mrkit(&["--data", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out), json!([{"task": "omega", "result": {"(0,0)": {"X^0": "1"}}}]));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_q = dir.path().join("bad.json");
    std::fs::write(&bad_q, r#"{"q": [[1, 0, "1"]], "r": []}"#).unwrap();
    let bad_rat = dir.path().join("rat.json");
    std::fs::write(&bad_rat, r#"{"q": [[0, 0, "1/0"]], "r": []}"#).unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["verify", "--data", "/nonexistent/data.json"],
        vec!["wave", "--data", bad_q.to_str().unwrap()],
        vec!["omega", "--data", bad_rat.to_str().unwrap()],
        vec!["omega"],
        vec!["npoint", "--data", bad_q.to_str().unwrap(), "--k", "7"],
        vec!["verify", "--inject-fault", "nonsense"],
        vec!["--no-such-flag"],
    ];
    for args in cases {
        let out = mrkit(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn flat_data_verifies() {
    let out = mrkit(&["verify", "waves", "--data", &data_file("FLAT.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).ends_with("overall: PASS\n"));
}
