use proptest::prelude::*;
use qkrec_core::checks::{golden_input, random_spec};
use qkrec_core::correlators::{bundled_point_table, Backend, CorrelatorTable, TauVector};
use qkrec_core::qfun::{total_residue, KVector, LaurentQ};
use qkrec_core::reconstruct::{
    ancestor_inputs, assemble_f1m, case2_residue_identity, chain_sum_y, compute_g, compute_tau, linalg,
    perturbation_jacobian, run_pipeline, theorem1, wdvv_check, ReconstructionInput, SlotVar, Toggles, YSign, CASES,
};
use qkrec_core::report::{f1_report, to_json};
use qkrec_core::ring::{CycloRational, Series, SeriesRingConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn backend() -> Backend {
    Backend::new(bundled_point_table().unwrap(), true)
}

fn zero_input(order: u32) -> ReconstructionInput {
    let ring = SeriesRingConfig::new(["e"], false, order).unwrap();
    ReconstructionInput {
        t: vec![LaurentQ::zero(&ring, 1)],
        ring,
        toggles: Toggles::default(),
    }
}

#[test]
fn zero_input_gives_zero_report() {
    let b = backend();
    let rep = theorem1(&b, &zero_input(2)).unwrap();
    assert!(rep.tau.is_zero());
    assert!(rep.tbar.iter().all(LaurentQ::is_zero));
    assert!(rep.logdet.is_zero() && rep.f1_tau.is_zero() && rep.total.is_zero());
    assert!(rep.residues.iter().all(|c| c.sum().is_zero()));
}

#[test]
fn y_classes_at_the_origin() {
    let b = backend();
    let p = run_pipeline(&b, &zero_input(2)).unwrap();
    let ring = p.ring.clone();
    let one_minus_q = LaurentQ::scalar_from_terms(&ring, [(0, CycloRational::one()), (1, CycloRational::from_int(-1))]);
    for r in [2, 3, 4, 6] {
        assert_eq!(p.y[&r].as_laurent(), Some(&one_minus_q), "y_{r}");
    }
}

#[test]
fn g_matrix_examples() {
    let b = backend();
    let ring = SeriesRingConfig::new(["e"], false, 1).unwrap();
    let e = Series::var(&ring, "e").unwrap();
    let tau = TauVector::from_levels(vec![KVector::scalar(e.clone())]);
    let g = compute_g(&b, &tau, 1).unwrap();
    assert_eq!(g.g[0][0], &Series::one(&ring) + &e);
    let ring2 = SeriesRingConfig::new(["e"], false, 2).unwrap();
    let e2 = Series::var(&ring2, "e").unwrap();
    let m = vec![vec![&Series::one(&ring2) + &e2]];
    let inv = linalg::inverse(&m).unwrap();
    assert_eq!(inv[0][0], &(&Series::one(&ring2) - &e2) + &e2.pow(2));
    let zero = compute_g(&b, &TauVector::zero(&ring, 1, 1), 1).unwrap();
    assert_eq!(zero.g[0][0], Series::one(&ring));
}

#[test]
fn golden_run_fixed_point() {
    let b = backend();
    let input = golden_input(2).unwrap();
    let run = compute_tau(&b, &input.ring, &input.t).unwrap();
    assert!(run.gaps_increase());
    assert!(run.iterations <= 3);
    let tbar = ancestor_inputs(&b, &run.tau, &input.t).unwrap();
    assert!(tbar[0].eval_at(&CycloRational::one()).unwrap().is_zero());
}

#[test]
fn golden_total_decomposes() {
    let b = backend();
    let rep = theorem1(&b, &golden_input(2).unwrap()).unwrap();
    let mut sum = &rep.f1_tau + &rep.logdet;
    for c in &rep.residues {
        sum += &c.sum();
    }
    assert_eq!(sum, rep.total);
    assert_eq!(rep.total.to_string(), "(1/24)*e + (1/48)*e^2");
}

#[test]
fn reports_are_deterministic() {
    let input = golden_input(2).unwrap();
    let first = to_json(&f1_report(&backend(), &input, &[]).unwrap());
    let second = to_json(&f1_report(&backend(), &input, &[]).unwrap());
    assert_eq!(first, second);
}

#[test]
fn wdvv_holds_for_the_point() {
    let b = backend();
    let ring = SeriesRingConfig::new(["e"], false, 2).unwrap();
    let tau = TauVector::from_levels(vec![KVector::scalar(Series::var(&ring, "e").unwrap())]);
    let out = wdvv_check(&b, &tau).unwrap();
    assert!(!out.is_empty() && out.iter().all(|o| o.holds));
}

/// Scales every genus-1 entry by `1 + k`, k the descendant exponent, which
/// leaves a pole of `F_{1,2}` at `x = 1`.
fn perturbed_table() -> CorrelatorTable {
    let base = bundled_point_table().unwrap();
    let entries = base.entries().map(|(k, v)| {
        let mut v = v.clone();
        if k.genus == 1 {
            let kmax = k.slots().iter().map(|s| s.exponent).max().unwrap_or(0);
            v.value = &v.value * &CycloRational::from_int(1 + i64::from(kmax));
        }
        (k.clone(), v)
    });
    CorrelatorTable::from_entries(base.target().clone(), entries).unwrap()
}

#[test]
fn case2_identity_discriminates() {
    let b = backend();
    let p = run_pipeline(&b, &golden_input(2).unwrap()).unwrap();
    let (lhs, rhs) = case2_residue_identity(&b, &p).unwrap();
    assert_eq!(lhs, rhs);

    let bad = Backend::new(perturbed_table(), true);
    let p = run_pipeline(&bad, &golden_input(2).unwrap()).unwrap();
    let (lhs, rhs) = case2_residue_identity(&bad, &p).unwrap();
    assert_ne!(lhs, rhs);
}

#[test]
fn toggles_are_honoured() {
    let b = backend();
    let mut input = golden_input(2).unwrap();
    let minus = run_pipeline(&b, &input).unwrap();
    input.toggles.y_sign = YSign::Plus;
    let plus = run_pipeline(&b, &input).unwrap();
    assert_eq!(minus.tau(), plus.tau());
    // x1 -/+ c: the two signs average to xbar_1
    let avg = (&minus.y[&2] + &plus.y[&2]).scale_c(&CycloRational::from_frac(1, 2));
    assert_eq!(avg.as_laurent(), Some(minus.xbar(1)));

    let unweighted = Backend::new(bundled_point_table().unwrap(), false);
    let ring = SeriesRingConfig::new(["e"], false, 2).unwrap();
    let e = Series::var(&ring, "e").unwrap();
    let tau = TauVector::from_levels(vec![KVector::scalar(e.clone()), KVector::scalar(e)]);
    let w = compute_g(&b, &tau, 1).unwrap();
    let u = compute_g(&unweighted, &tau, 1).unwrap();
    assert_ne!(w.g, u.g);
}

fn spec_input(seed: u64, order: u32, r_max: u32) -> ReconstructionInput {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_spec(&mut rng, order, r_max).input(1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tau_contracts(seed in any::<u64>(), n in 1u32..=3, r_max in 1u32..=3) {
        let b = backend();
        let input = spec_input(seed, n, r_max);
        let run = compute_tau(&b, &input.ring, &input.t).unwrap();
        prop_assert!(run.gaps_increase());
        prop_assert!(run.iterations <= n as usize + 1);
        for t in ancestor_inputs(&b, &run.tau, &input.t).unwrap() {
            prop_assert!(t.eval_at(&CycloRational::one()).unwrap().is_zero());
        }
    }

    #[test]
    fn jacobian_matches_perturbation(seed in any::<u64>(), n in 1u32..=3) {
        let b = backend();
        let input = spec_input(seed, n, 2);
        let p = run_pipeline(&b, &input).unwrap();
        for r in [1, 2] {
            let oracle = perturbation_jacobian(&b, &input.ring, &input.t, r).unwrap();
            prop_assert_eq!(linalg::truncated(&oracle, n - 1), linalg::truncated(&p.jacobian[&r], n - 1));
        }
    }

    #[test]
    fn chain_sum_agrees_with_closed_form(seed in any::<u64>(), r in prop::sample::select(vec![2u32, 3, 4, 6])) {
        let b = backend();
        let input = spec_input(seed, 3, 2);
        let p = run_pipeline(&b, &input).unwrap();
        // A_r lies in the maximal ideal, so K chain terms fix y_r mod Lambda_+^{K+1}
        for k in 1..=3 {
            let chain = chain_sum_y(&b, &p, r, k).unwrap();
            prop_assert!((&chain - &p.y[&r]).truncated(k).is_zero(), "r={} k={}", r, k);
        }
    }

    #[test]
    fn assembled_cases_have_vanishing_global_residue(seed in any::<u64>()) {
        let b = backend();
        let input = spec_input(seed, 2, 3);
        let p = run_pipeline(&b, &input).unwrap();
        for m in CASES {
            let f = assemble_f1m(&b, &p, m, SlotVar::X).unwrap();
            prop_assert!(total_residue(&f).unwrap().is_zero(), "M={}", m);
        }
        let (lhs, rhs) = case2_residue_identity(&b, &p).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
