use qkrec_wasm_demo::{constants, residues, tau};
use serde_json::Value;

#[test]
fn constant_rows() {
    let rows: Value = serde_json::from_str(&constants(3).unwrap()).unwrap();
    assert_eq!(rows[0]["2a"], "1/4");
    assert_eq!(rows[0]["2c"], Value::Null);
    assert_eq!(rows[1]["2c"], "1");
    assert_eq!(rows[2]["r3"], "18");
    assert_eq!(rows[3]["2a"], "48");
}

#[test]
fn residues_at_every_pole_sum_to_zero() {
    // q^2 / ((q - 1)(q + 1)) dq/q: 1/2 at each of +-1, -1 at infinity
    let out: Value = serde_json::from_str(&residues(r#"{"numerator": [[2, "1"]], "poles": [[0, 1], [6, 1]]}"#).unwrap()).unwrap();
    assert_eq!(out["sum"], "0");
    let at = |p: &str| out["points"].as_array().unwrap().iter().find(|x| x["at"] == p).unwrap()["residue"].clone();
    assert_eq!(at("1"), "1/2");
    assert_eq!(at("-1"), "1/2");
    assert_eq!(at("inf"), "-1");
    assert!(residues("not json").is_err());
}

#[test]
fn tau_on_a_small_spec() {
    let spec = r#"{"variables": ["e"], "order": 2, "inputs": [{"level": 1, "terms": [{"exponent": 0, "coefficient": "e"}]}]}"#;
    let rep: Value = serde_json::from_str(&tau(spec).unwrap()).unwrap();
    assert_eq!(rep["gaps_strictly_increase"], true);
    assert!(tau(&spec.replace("\"order\": 2", "\"order\": 2, \"tables\": [\"x.json\"]")).is_err());
}
