//! End-to-end runs of the binary against the shipped scenarios.

use std::path::{Path, PathBuf};
use std::process::Command;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn run(kind: &str, scenario_name: &str, out: &Path, extra: &[&str]) -> (i32, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_valfield"))
        .arg(kind)
        .arg("--scenario")
        .arg(scenario(scenario_name))
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs");
    let code = output.status.code().expect("exit code");
    let stderr = String::from_utf8_lossy(&output.stderr).to_string();
    (code, stderr)
}

#[test]
fn doag_scenarios_agree() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["doag-s13.json", "doag-contiguous.json"] {
        let out = dir.path().join(name);
        let (code, err) = run("doag", name, &out, &["--seed", "3"]);
        assert_eq!(code, 0, "{err}");
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(report["report"]["agree"], serde_json::json!(true));
    }
}

#[test]
fn non_contiguous_axes_report_false_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, _) = run("doag", "doag-s13.json", &out, &[]);
    assert_eq!(code, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["report"]["msContiguity"], serde_json::json!(false));
    assert_eq!(report["report"]["msCondition4"], serde_json::json!(false));
    assert_eq!(
        report["report"]["counterexamplePattern"],
        serde_json::json!([2])
    );
}

#[test]
fn c_axioms_clean() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, err) = run("c-axioms", "c-axioms.json", &out, &["--seed", "5"]);
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["report"]["violations"], serde_json::json!([]));
}

#[test]
fn classify_curated_targets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, err) = run("classify", "classify.json", &out, &["--seed", "5"]);
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let cats: Vec<&str> = report["report"]["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["verdict"]["category"].as_str().unwrap())
        .collect();
    assert_eq!(cats, vec!["residual", "realized", "valuational", "limit"]);
}

#[test]
fn counterexample_n1_report_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cx-report.json");
    let (code, err) = run(
        "counterexample",
        "counterexample-n1.json",
        &out,
        &["--seed", "5"],
    );
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let body = &report["report"];
    assert_eq!(body["n"], serde_json::json!(1));
    assert_eq!(body["achieved"].as_array().unwrap().len(), 10);
    assert_eq!(body["ceilingViolations"], serde_json::json!([]));
    assert_eq!(body["verdict"]["T_up_to_n"], serde_json::json!("pass"));
    assert_eq!(
        body["verdict"]["T_{n+1}"],
        serde_json::json!("fail-evidence")
    );
}

#[test]
fn reports_are_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (out, seed) in [(&a, "11"), (&b, "11")] {
        let (code, err) = run("separated", "separated.json", out, &["--seed", seed]);
        assert_eq!(code, 0, "{err}");
    }
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "same seed must reproduce the identical report"
    );
}

#[test]
fn transfer_through_separated_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, err) = run("separated", "separated-transfer.json", &out, &["--seed", "2"]);
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let transfer = &report["report"]["families"][0]["transfer"];
    assert_eq!(transfer["coarseViolations"], serde_json::json!(0));
    assert_eq!(transfer["liftingSeparated"], serde_json::json!(true));
}

#[test]
fn inequality_min_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, err) = run("inequality", "inequality.json", &out, &["--seed", "6"]);
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(
        report["report"]["minEqualityViolations"],
        serde_json::json!(0)
    );
}

#[test]
fn kind_mismatch_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, err) = run("trace", "doag-s13.json", &out, &[]);
    assert_eq!(code, 3);
    assert!(err.contains("does not match"), "stderr: {err}");
}

#[test]
fn malformed_scenario_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_valfield"))
        .args(["doag", "--scenario"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn unknown_fields_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{ "version": "1", "kind": "doag", "payload": { "r": 2, "s": [1], "extra": 1 } }"#,
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let output = Command::new(env!("CARGO_BIN_EXE_valfield"))
        .args(["doag", "--scenario"])
        .arg(&bad)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("unknown field"), "stderr: {err}");
}

#[test]
fn csv_format_renders() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let (code, err) = run("doag", "doag-s13.json", &out, &["--format", "csv"]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("report.msContiguity,false"));
}

#[test]
fn invalid_threads_env_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let output = Command::new(env!("CARGO_BIN_EXE_valfield"))
        .args(["doag", "--scenario"])
        .arg(scenario("doag-s13.json"))
        .arg("--out")
        .arg(&out)
        .env("VALFIELD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    // a positive cap is accepted and recorded
    let output = Command::new(env!("CARGO_BIN_EXE_valfield"))
        .args(["doag", "--scenario"])
        .arg(scenario("doag-s13.json"))
        .arg("--out")
        .arg(&out)
        .env("VALFIELD_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["threadsCap"], serde_json::json!(4));
}
