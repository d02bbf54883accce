use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qkrec(args: &[&str], env: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qkrec"));
    cmd.args(args).env_remove("QKREC_TABLE_PATH");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("qkrec runs")
}

fn golden_spec() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/golden_spec.json")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON report")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn malformed_spec_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "bad.json", "{\n  \"variables\": [\"e\"],\n  \"order\": 2,,\n}\n");
    let out = qkrec(&["tau", "--spec", s(&spec)], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3, column 14"), "{err}");
}

#[test]
fn unknown_spec_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "typo.json", "{\"variables\": [\"e\"], \"order\": 2, \"toggle\": {}}");
    assert_eq!(qkrec(&["f1", "--spec", s(&spec)], &[]).status.code(), Some(2));
}

#[test]
fn zero_input_reports() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "zero.json", "{\"variables\": [\"e\"], \"order\": 2}");
    let tau = json(&qkrec(&["tau", "--spec", s(&spec)], &[]));
    assert_eq!(tau["gap_orders"], serde_json::json!(["inf"]));
    assert_eq!(tau["tbar_residual_order"], serde_json::json!(["inf"]));
    assert_eq!(tau["tau"], serde_json::json!([[[]]]));
    let f1 = json(&qkrec(&["f1", "--spec", s(&spec)], &[]));
    assert_eq!(f1["total"], serde_json::json!([]));
    assert_eq!(f1["total_display"], "0");
}

#[test]
fn tau_report_on_the_golden_spec() {
    let rep = json(&qkrec(&["tau", "--spec", s(&golden_spec())], &[]));
    assert_eq!(rep["schema"], "qkrec-tau-report-v1");
    assert_eq!(rep["gaps_strictly_increase"], true);
    assert_eq!(rep["order"], 2);
    assert_eq!(rep["tables"][0]["name"], "bundled:point");
    assert_eq!(rep["tables"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn reports_echo_toggles() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(golden_spec()).unwrap().replacen(
        "\"order\": 2,",
        "\"order\": 2, \"toggles\": {\"y_sign\": \"plus\", \"cycle_weight_in_brackets\": false, \"a_insertion\": \"level_1\"},",
        1,
    );
    let spec = write(dir.path(), "toggled.json", &text);
    let rep = json(&qkrec(&["f1", "--spec", s(&spec)], &[]));
    assert_eq!(
        rep["toggles"],
        serde_json::json!({"y_sign": "plus", "cycle_weight_in_brackets": false, "a_insertion": "level_1"})
    );
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = qkrec(&["f1", "--spec", s(&golden_spec()), "--output", s(&out_path)], &[]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/golden_f1.json");
    assert_eq!(std::fs::read(out_path).unwrap(), std::fs::read(golden).unwrap());
}

#[test]
fn missing_keys_are_reported_in_one_batch() {
    let tables = tempfile::tempdir().unwrap();
    write(
        tables.path(),
        "empty.json",
        "{\"schema\": \"qkrec-table-v1\", \"target\": {\"rank\": 1, \"pairing\": [[1]]}, \"entries\": []}",
    );
    let specs = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(golden_spec()).unwrap().replace("bundled:point", "empty.json");
    let spec = write(specs.path(), "spec.json", &text);

    // not found without the search path
    let out = qkrec(&["f1", "--spec", s(&spec)], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("QKREC_TABLE_PATH"));

    let out = qkrec(&["f1", "--spec", s(&spec)], &[("QKREC_TABLE_PATH", tables.path())]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    let keys: Vec<&str> = err.lines().filter(|l| l.trim_start().starts_with('<')).collect();
    assert!(keys.len() > 4, "{err}");
    for shape in ["l=4_1", "l=3_1", "l=2_1+1_2", "l=1_1+1_2+1_3"] {
        assert!(keys.iter().any(|k| k.contains(shape)), "no {shape} key in\n{err}");
    }
}

#[test]
fn table_validate_flags_violations() {
    let dir = tempfile::tempdir().unwrap();
    let bundled = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/point_table.json");
    let good = std::fs::read_to_string(&bundled).unwrap();
    let rep = json(&qkrec(&["table", "validate", s(&bundled)], &[]));
    assert_eq!(rep["valid"], true);

    let bad = good.replacen("\"value\":\"1/2\"", "\"value\":\"7\"", 1);
    assert_ne!(bad, good);
    let path = write(dir.path(), "bad.json", &bad);
    let out = qkrec(&["table", "validate", s(&path)], &[]);
    assert_eq!(out.status.code(), Some(1));
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!rep["violations"].as_array().unwrap().is_empty());

    let broken = write(dir.path(), "broken.json", "{\"schema\": \"qkrec-table-v1\",\n \"target\": }");
    let out = qkrec(&["table", "validate", s(&broken)], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn check_reports_and_options() {
    let rep = json(&qkrec(&["check", "residue", "--seed", "7"], &[]));
    assert_eq!(rep["seed"], 7);
    assert_eq!(rep["all_passed"], true);
    assert_eq!(rep["instances"].as_array().unwrap().len(), 50);
    let rep = json(&qkrec(&["check", "case2-residue", "--order", "1"], &[]));
    assert_eq!(rep["order"], 1);
    assert_eq!(qkrec(&["check", "nonsense"], &[]).status.code(), Some(2));
}
