//! Named invariant suites behind `qkrec check`.
//!
//! Each suite runs a deterministic batch of instances (seeded ChaCha draws)
//! and reports pass/fail per instance.  A suite passes iff every instance does;
//! an instance that errors counts as a failure with the error as its detail.

use std::collections::BTreeMap;

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::correlators::{bundled_point_table, Backend, PointBackend, TauVector};
use crate::dmconst::{self, Family};
use crate::error::{Error, Result};
use crate::qfun::{total_residue, KVector, LaurentQ, RationalQ};
use crate::reconstruct::{
    ancestor_inputs, case2_residue_identity, compute_tau, linalg, perturbation_jacobian, run_pipeline, wdvv_check,
    ReconstructionInput, Toggles,
};
use crate::ring::{binomial, CycloRational, Series, SeriesRingConfig};
use crate::spec::{CoefficientSpec, InputSpec, MonomialSpec, RunSpec, TermSpec};

pub const SUITES: [&str; 8] = [
    "string",
    "dilaton",
    "wdvv",
    "contraction",
    "jacobian",
    "residue",
    "dmconst",
    "case2-residue",
];

pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Clone, Serialize)]
pub struct Instance {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub seed: u64,
    pub order: Option<u32>,
    pub passed: usize,
    pub failed: usize,
    pub all_passed: bool,
    pub instances: Vec<Instance>,
}

struct Collector(Vec<Instance>);

impl Collector {
    fn push(&mut self, name: impl Into<String>, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.0.push(Instance {
            name: name.into(),
            passed,
            detail,
        });
    }
}

/// Runs `suite`; unknown names are an error, failing instances are not.
pub fn run_suite(suite: &str, seed: u64, order: Option<u32>) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Collector(Vec::new());
    match suite {
        "string" => string_suite(&mut rng, &mut c),
        "dilaton" => dilaton_suite(&mut rng, &mut c),
        "wdvv" => wdvv_suite(order.unwrap_or(2), &mut c)?,
        "contraction" => contraction_suite(&mut rng, order.unwrap_or(3), &mut c)?,
        "jacobian" => jacobian_suite(&mut rng, order.unwrap_or(3), &mut c)?,
        "residue" => residue_suite(&mut rng, &mut c)?,
        "dmconst" => dmconst_suite(&mut c),
        "case2-residue" => case2_suite(&mut rng, order.unwrap_or(2), &mut c)?,
        other => {
            return Err(Error::Unsupported(format!(
                "unknown suite {other:?}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    }
    let passed = c.0.iter().filter(|i| i.passed).count();
    let failed = c.0.len() - passed;
    Ok(CheckReport {
        suite: suite.to_owned(),
        seed,
        order,
        passed,
        failed,
        all_passed: failed == 0,
        instances: c.0,
    })
}

const DRAWS: usize = 200;

fn random_exponents(rng: &mut ChaCha8Rng, n: usize) -> Vec<i32> {
    (0..n).map(|_| rng.gen_range(-3..=3)).collect()
}

fn fmt_ks(ks: &[i32]) -> String {
    ks.iter().map(i32::to_string).collect::<Vec<_>>().join(",")
}

/// `<1, L^{k_1}, ..., L^{k_n}>_0` via the string equation.
pub fn point_string_rhs(point: &PointBackend, ks: &[i32]) -> BigRational {
    let mut acc = point.exponent_value(ks);
    for i in 0..ks.len() {
        let k = ks[i];
        let (range, sign) = if k > 0 { (0..k, 1) } else { (k..0, -1) };
        for m in range {
            let mut shifted = ks.to_vec();
            shifted[i] = m;
            acc += point.exponent_value(&shifted) * BigRational::from_integer(sign.into());
        }
    }
    acc
}

/// `<L, L^{k_1}, ..., L^{k_n}>_0` via the dilaton equation.
pub fn point_dilaton_rhs(point: &PointBackend, ks: &[i32]) -> BigRational {
    let mut with_one = vec![0];
    with_one.extend_from_slice(ks);
    point.exponent_value(ks) * BigRational::from_integer((ks.len() as i64 - 2).into())
        + point.exponent_value(&with_one)
}

fn string_suite(rng: &mut ChaCha8Rng, c: &mut Collector) {
    let point = PointBackend::new(true);
    for _ in 0..DRAWS {
        let n = rng.gen_range(3..=6);
        let ks = random_exponents(rng, n);
        let mut full = vec![0];
        full.extend_from_slice(&ks);
        let lhs = point.exponent_value(&full);
        let rhs = point_string_rhs(&point, &ks);
        c.push(format!("<1,{}>", fmt_ks(&ks)), Ok((lhs == rhs, format!("{lhs} vs {rhs}"))));
    }
}

fn dilaton_suite(rng: &mut ChaCha8Rng, c: &mut Collector) {
    let point = PointBackend::new(true);
    for _ in 0..DRAWS {
        let n = rng.gen_range(3..=6);
        let ks = random_exponents(rng, n);
        let mut full = vec![1];
        full.extend_from_slice(&ks);
        let lhs = point.exponent_value(&full);
        let rhs = point_dilaton_rhs(&point, &ks);
        c.push(format!("<L,{}>", fmt_ks(&ks)), Ok((lhs == rhs, format!("{lhs} vs {rhs}"))));
    }
}

fn bundled_backend(toggles: &Toggles) -> Result<Backend> {
    Ok(Backend::new(bundled_point_table()?, toggles.cycle_weight_in_brackets))
}

fn wdvv_suite(order: u32, c: &mut Collector) -> Result<()> {
    let backend = bundled_backend(&Toggles::default())?;
    let ring = SeriesRingConfig::new(["e"], false, order)?;
    let tau = TauVector::from_levels(vec![KVector::scalar(Series::var(&ring, "e")?)]);
    match wdvv_check(&backend, &tau) {
        Ok(outcomes) => {
            for o in outcomes {
                c.push(
                    format!("phi_{} psi_{} tau_1=e N={order}", o.phi, o.psi),
                    Ok((o.holds, format!("cleared degrees ({}, {})", o.degree_x, o.degree_y))),
                );
            }
        }
        Err(e) => c.push(format!("tau_1=e N={order}"), Err(e)),
    }
    Ok(())
}

/// A random point-target spec over `a, b` with nonnegative exponents.
pub fn random_spec(rng: &mut ChaCha8Rng, order: u32, r_max: u32) -> RunSpec {
    let vars = ["a", "b"];
    let inputs = (1..=r_max)
        .map(|level| {
            let terms = (0..rng.gen_range(1..=3))
                .map(|_| {
                    let mut powers = BTreeMap::new();
                    powers.insert(vars[rng.gen_range(0..2)].to_owned(), 1);
                    if rng.gen_bool(0.25) {
                        *powers.entry(vars[rng.gen_range(0..2)].to_owned()).or_insert(0) += 1;
                    }
                    let mut coeff = rng.gen_range(1..=2);
                    if rng.gen_bool(0.5) {
                        coeff = -coeff;
                    }
                    TermSpec {
                        exponent: rng.gen_range(0..=2),
                        basis: 0,
                        coefficient: CoefficientSpec::Monomials(vec![MonomialSpec {
                            coeff: coeff.to_string(),
                            powers,
                        }]),
                    }
                })
                .collect();
            InputSpec { level, terms }
        })
        .collect();
    RunSpec {
        variables: vars.iter().map(|v| v.to_string()).collect(),
        novikov: false,
        order,
        inputs,
        tables: vec![crate::correlators::BUNDLED_POINT_NAME.to_owned()],
        toggles: Toggles::default(),
        output: None,
    }
}

/// `t_1 = e (q - 1)` at order `n`.
pub fn golden_input(order: u32) -> Result<ReconstructionInput> {
    let ring = SeriesRingConfig::new(["e"], false, order)?;
    let e = Series::var(&ring, "e")?;
    let mut t = LaurentQ::zero(&ring, 1);
    t.add_term(1, &KVector::scalar(e.clone()));
    t.add_term(0, &KVector::scalar(-&e));
    Ok(ReconstructionInput {
        ring,
        t: vec![t],
        toggles: Toggles::default(),
    })
}

fn describe(spec: &RunSpec) -> String {
    format!("N={} r_max={}", spec.order, spec.inputs.len())
}

fn contraction_suite(rng: &mut ChaCha8Rng, max_order: u32, c: &mut Collector) -> Result<()> {
    let backend = bundled_backend(&Toggles::default())?;
    for i in 0..20 {
        let (n, r_max) = (rng.gen_range(1..=max_order), rng.gen_range(1..=3));
        let spec = random_spec(rng, n, r_max);
        let outcome = (|| {
            let input = spec.input(1)?;
            let run = compute_tau(&backend, &input.ring, &input.t)?;
            let tbar = ancestor_inputs(&backend, &run.tau, &input.t)?;
            let mut residual_zero = true;
            for t in &tbar {
                residual_zero &= t.eval_at(&CycloRational::one())?.is_zero();
            }
            let steps_ok = run.iterations <= spec.order as usize + 1;
            let ok = run.gaps_increase() && steps_ok && residual_zero;
            let gaps: Vec<String> = run.gap_orders.iter().map(|g| crate::report::order_string(*g)).collect();
            Ok((
                ok,
                format!(
                    "gaps [{}], {} steps, tbar(1) {}",
                    gaps.join(","),
                    run.iterations,
                    if residual_zero { "= 0" } else { "!= 0" }
                ),
            ))
        })();
        c.push(format!("spec {i} ({})", describe(&spec)), outcome);
    }
    Ok(())
}

fn jacobian_instance(backend: &Backend, input: &ReconstructionInput, r: u32) -> Result<(bool, String)> {
    let n = input.ring.order();
    let p = run_pipeline(backend, input)?;
    let oracle = perturbation_jacobian(backend, &input.ring, &input.t, r)?;
    let ours = linalg::truncated(&p.jacobian[&r], n - 1);
    let oracle = linalg::truncated(&oracle, n - 1);
    Ok((oracle == ours, format!("(I-A)^-1 = {} vs perturbation {}", ours[0][0], oracle[0][0])))
}

fn jacobian_suite(rng: &mut ChaCha8Rng, max_order: u32, c: &mut Collector) -> Result<()> {
    let backend = bundled_backend(&Toggles::default())?;
    for n in 1..=max_order {
        let golden = golden_input(n)?;
        for r in [1, 2] {
            c.push(format!("golden N={n} r={r}"), jacobian_instance(&backend, &golden, r));
        }
        for i in 0..2 {
            let spec = random_spec(rng, n, 2);
            let input = spec.input(1)?;
            for r in [1, 2] {
                c.push(
                    format!("spec {i} ({}) r={r}", describe(&spec)),
                    jacobian_instance(&backend, &input, r),
                );
            }
        }
    }
    Ok(())
}

/// A random rational function with poles among the 12th roots of unity.
pub fn random_rational(rng: &mut ChaCha8Rng) -> Result<RationalQ> {
    let ring = SeriesRingConfig::new(["e"], false, 2)?;
    let e = Series::var(&ring, "e")?;
    let mut num = LaurentQ::zero(&ring, 1);
    for _ in 0..rng.gen_range(1..=4) {
        let c = Series::from_int(&ring, rng.gen_range(-3..=3)).checked_add(&e.scale_int(rng.gen_range(-2..=2)))?;
        num.add_term(rng.gen_range(-3..=3), &KVector::scalar(c));
    }
    let mut den = BTreeMap::new();
    for _ in 0..rng.gen_range(0..=3) {
        *den.entry(CycloRational::zeta_pow(rng.gen_range(0..12))).or_insert(0) += rng.gen_range(1..=2);
    }
    RationalQ::new(num, den)
}

fn residue_suite(rng: &mut ChaCha8Rng, c: &mut Collector) -> Result<()> {
    for i in 0..50 {
        let f = random_rational(rng)?;
        let poles = f.residue_points().len();
        c.push(
            format!("rational {i}"),
            total_residue(&f).map(|s| (s.is_zero(), format!("{poles} residue points, sum {}", s.comp(0)))),
        );
    }
    Ok(())
}

fn dmconst_suite(c: &mut Collector) {
    let int = |n: u64| BigRational::from_integer(n.into());
    for l in 0..=8u32 {
        // independent products rather than the closed forms
        let two_pow: BigRational = (0..l).map(|_| int(2)).product();
        let fact_l1: BigRational = (1..=u64::from(l) + 1).map(int).product();
        let expected = two_pow * fact_l1 / int(4);
        let got = dmconst::constant_2a(l);
        c.push(format!("2a l={l}"), Ok((got == expected, got.to_string())));
        if l >= 1 {
            let got = dmconst::constant_2c(l);
            c.push(
                format!("2c l={l}"),
                got.map(|g| (g == expected, g.to_string())),
            );
        }
        for r in [3u64, 4, 6] {
            let expected: BigRational =
                (0..l).map(|_| int(r)).product::<BigRational>() * (1..=u64::from(l)).map(int).product::<BigRational>();
            c.push(
                format!("cyclic r={r} l={l}"),
                dmconst::constant_cyclic(r as u32, l).map(|g| (g == expected, g.to_string())),
            );
        }
        let config: BigRational = (0..=l)
            .map(|k| binomial(i64::from(l), k) * (1..=u64::from(k)).map(int).product::<BigRational>()
                * (1..=u64::from(l - k)).map(int).product::<BigRational>())
            .sum();
        c.push(format!("configuration count l={l}"), Ok((config == dmconst::configuration_count(l), config.to_string())));
    }
    for fam in [Family::TwoA, Family::TwoC, Family::Cyclic(3), Family::Cyclic(4), Family::Cyclic(6)] {
        c.push(
            format!("recursion {fam:?}"),
            dmconst::verify_dilaton_recursion(fam, 8).map(|r| (r.all_hold, format!("{} identities", r.rows.len()))),
        );
    }
}

fn case2_instance(backend: &Backend, input: &ReconstructionInput) -> Result<(bool, String)> {
    let p = run_pipeline(backend, input)?;
    let (lhs, rhs) = case2_residue_identity(backend, &p)?;
    Ok((lhs == rhs, format!("Res_(0,inf) = {lhs}, Res_-1 = {rhs}")))
}

fn case2_suite(rng: &mut ChaCha8Rng, order: u32, c: &mut Collector) -> Result<()> {
    let backend = bundled_backend(&Toggles::default())?;
    c.push(format!("golden N={order}"), case2_instance(&backend, &golden_input(order)?));
    for i in 0..4 {
        let spec = random_spec(rng, order, 2);
        c.push(format!("spec {i} ({})", describe(&spec)), case2_instance(&backend, &spec.input(1)?));
    }
    Ok(())
}
