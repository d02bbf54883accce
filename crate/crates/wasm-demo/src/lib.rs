//! Browser bindings: fixed-locus constants, residues of a rational function
//! and the `tau` iteration on the bundled point table.
//!
//! Every entry point takes and returns JSON text; errors come back as strings.

use std::collections::BTreeMap;

use qkrec_core::correlators::BUNDLED_POINT_NAME;
use qkrec_core::dmconst;
use qkrec_core::qfun::{residue_form, total_residue, KVector, LaurentQ, RationalQ};
use qkrec_core::report::{tau_report, to_json};
use qkrec_core::ring::{CycloRational, Series, SeriesRingConfig};
use qkrec_core::spec::RunSpec;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Rows `{l, 2a, 2c, r3, r4, r6}` for `l = 0..=l_max`.
#[wasm_bindgen]
pub fn constants(l_max: u32) -> Result<String, String> {
    let mut rows = Vec::new();
    for l in 0..=l_max.min(40) {
        let c2 = dmconst::constant_2c(l).map(|c| c.to_string()).ok();
        let cyc = |r| dmconst::constant_cyclic(r, l).map(|c| c.to_string()).map_err(err);
        rows.push(json!({
            "l": l,
            "2a": dmconst::constant_2a(l).to_string(),
            "2c": c2,
            "r3": cyc(3)?,
            "r4": cyc(4)?,
            "r6": cyc(6)?,
        }));
    }
    Ok(to_json(&rows))
}

/// Residues of `f(q) dq/q` at every pole, including 0 and infinity, for `f = sum c_k q^k / prod (q - z^j)^m`.
///
/// Input: `{"numerator": [[k, "c"], ...], "poles": [[j, m], ...]}` with
/// `z = exp(2 pi i / 12)`; coefficients are exact rationals or `"z^k"`.
#[wasm_bindgen]
pub fn residues(input: &str) -> Result<String, String> {
    let v: Value = serde_json::from_str(input).map_err(err)?;
    let ring = SeriesRingConfig::new(Vec::<String>::new(), false, 1).map_err(err)?;
    let mut num = LaurentQ::zero(&ring, 1);
    for term in v["numerator"].as_array().ok_or("numerator must be a list")? {
        let k = term[0].as_i64().ok_or("exponent must be an integer")? as i32;
        let c = match &term[1] {
            Value::String(s) => CycloRational::parse(s).map_err(err)?,
            Value::Number(n) => CycloRational::from_int(n.as_i64().ok_or("integer coefficients only")?),
            _ => return Err("coefficient must be a string or integer".into()),
        };
        num.add_term(k, &KVector::scalar(Series::constant(&ring, c)));
    }
    let mut den = BTreeMap::new();
    for pole in v["poles"].as_array().map(Vec::as_slice).unwrap_or_default() {
        let j = pole[0].as_i64().ok_or("pole index must be an integer")?;
        let m = pole[1].as_u64().unwrap_or(1) as u32;
        *den.entry(CycloRational::zeta_pow(j)).or_insert(0) += m;
    }
    let f = RationalQ::new(num, den).map_err(err)?;
    let mut points = Vec::new();
    for p in f.residue_points() {
        let r = residue_form(&f, &p).map_err(err)?;
        points.push(json!({"at": p.to_string(), "residue": r.comp(0).constant_term().to_string()}));
    }
    let total = total_residue(&f).map_err(err)?;
    Ok(to_json(&json!({"points": points, "sum": total.comp(0).constant_term().to_string()})))
}

/// The `tau` report for a run spec; only the bundled point table is available.
#[wasm_bindgen]
pub fn tau(spec: &str) -> Result<String, String> {
    let spec = RunSpec::from_json_str(spec).map_err(err)?;
    if spec.tables.iter().any(|t| t != BUNDLED_POINT_NAME) {
        return Err(format!("only the {BUNDLED_POINT_NAME:?} table is available in the browser"));
    }
    let (input, backend, tables) = spec.prepare(None).map_err(err)?;
    Ok(to_json(&tau_report(&backend, &input, &tables).map_err(err)?))
}
