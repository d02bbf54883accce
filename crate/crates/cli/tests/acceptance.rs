//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

fn qkrec(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_qkrec"))
        .args(args)
        .output()
        .expect("qkrec runs");
    (out, start.elapsed())
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_owned()
}

struct Verdict {
    ok: bool,
    detail: String,
}

fn suite(name: &str, limit: Duration) -> Verdict {
    let (out, took) = qkrec(&["check", name]);
    let report: Option<Value> = serde_json::from_slice(&out.stdout).ok();
    let counts = report
        .as_ref()
        .map(|r| format!("{} passed, {} failed", r["passed"], r["failed"]))
        .unwrap_or_else(|| String::from_utf8_lossy(&out.stderr).trim().to_owned());
    Verdict {
        ok: out.status.success() && took <= limit,
        detail: format!("{counts}, {:.2?} (limit {limit:?})", took),
    }
}

/// Only the instances of the dmconst suite whose names start with `prefix`.
fn dmconst_subset(prefixes: &[&str]) -> Verdict {
    let (out, _) = qkrec(&["check", "dmconst"]);
    let Ok(report) = serde_json::from_slice::<Value>(&out.stdout) else {
        return Verdict {
            ok: false,
            detail: "unreadable report".into(),
        };
    };
    let picked: Vec<&Value> = report["instances"]
        .as_array()
        .into_iter()
        .flatten()
        .filter(|i| prefixes.iter().any(|p| i["name"].as_str().unwrap_or("").starts_with(p)))
        .collect();
    let failed = picked.iter().filter(|i| i["passed"] != Value::Bool(true)).count();
    Verdict {
        ok: !picked.is_empty() && failed == 0,
        detail: format!("{} instances, {failed} failed", picked.len()),
    }
}

fn golden_determinism() -> Verdict {
    let spec = root().join("tests/golden/golden_spec.json");
    let golden = std::fs::read(root().join("tests/golden/golden_f1.json")).expect("golden report");
    let spec = spec.to_str().expect("utf-8 path");
    let (a, _) = qkrec(&["f1", "--spec", spec]);
    let (b, _) = qkrec(&["f1", "--spec", spec]);
    let same = a.stdout == b.stdout;
    let matches = a.stdout == golden;
    Verdict {
        ok: a.status.success() && same && matches,
        detail: format!("repeat identical: {same}, matches stored golden: {matches}"),
    }
}

fn table_validation() -> Verdict {
    let table = root().join("../core/data/point_table.json");
    let (out, _) = qkrec(&["table", "validate", table.to_str().expect("utf-8 path")]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    let violations = report["violations"].as_array().map_or(usize::MAX, Vec::len);
    Verdict {
        ok: out.status.success() && violations == 0,
        detail: format!("{} rows checked, {violations} violations", report["checked"]),
    }
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("fixed-locus constants reproduce their closed forms", Box::new(|| suite("dmconst", Duration::from_secs(1)))),
        ("string equation, 200 random point correlators", Box::new(|| suite("string", Duration::from_secs(60)))),
        ("dilaton equation, 200 random point correlators", Box::new(|| suite("dilaton", Duration::from_secs(60)))),
        ("WDVV for the point at tau_1 = e, N = 2", Box::new(|| suite("wdvv", Duration::from_secs(120)))),
        ("contraction and fixed point, 20 random specs", Box::new(|| suite("contraction", Duration::from_secs(120)))),
        ("Jacobian (I - A_r)^-1 vs formal perturbation", Box::new(|| suite("jacobian", Duration::from_secs(120)))),
        ("case-2 residue identity at N = 2", Box::new(|| suite("case2-residue", Duration::from_secs(120)))),
        ("global residue theorem, 50 random rational functions", Box::new(|| suite("residue", Duration::from_secs(60)))),
        (
            "configuration and curve counting identities, l <= 8",
            Box::new(|| dmconst_subset(&["configuration count", "recursion"])),
        ),
        ("golden f1 report is byte-identical", Box::new(golden_determinism)),
        ("bundled point table validates", Box::new(table_validation)),
    ];
    let mut failures = 0;
    for (name, check) in &criteria {
        let v = check();
        if !v.ok {
            failures += 1;
        }
        println!("{} {name} ({})", if v.ok { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
