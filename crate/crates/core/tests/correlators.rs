use proptest::prelude::*;
use qkrec_core::checks::{point_dilaton_rhs, point_string_rhs};
use qkrec_core::correlators::{
    bundled_point_table, fixture_point_table, validate_table, CorrelatorKey, CorrelatorTable, FixtureBounds,
    PointBackend, Slot, BUNDLED_POINT_TABLE, TABLE_SCHEMA,
};
use qkrec_core::Error;

#[test]
fn bundled_table_matches_the_generator() {
    // regenerate with `cargo run -p qkrec-core --example regen_table`
    let fresh = fixture_point_table(FixtureBounds::default()).to_json();
    assert!(fresh == BUNDLED_POINT_TABLE, "bundled table is stale");
}

#[test]
fn bundled_table_validates_cleanly() {
    let table = bundled_point_table().unwrap();
    let report = validate_table(&table, &PointBackend::default());
    assert!(report.checked > 1000, "only {} instances checked", report.checked);
    assert!(report.violations.is_empty(), "{:?}", &report.violations[..report.violations.len().min(3)]);
}

#[test]
fn table_json_round_trip_is_canonical() {
    let table = bundled_point_table().unwrap();
    let again = CorrelatorTable::from_json_str(&table.to_json()).unwrap();
    assert_eq!(again.len(), table.len());
    assert_eq!(again.to_json(), table.to_json());
    assert_eq!(again.checksum(), table.checksum());
}

#[test]
fn table_errors_carry_positions() {
    let text = format!("{{\n  \"schema\": \"{TABLE_SCHEMA}\",\n  \"target\": {{\"rank\": 1 \"pairing\": [[1]]}}\n}}");
    match CorrelatorTable::from_json_str(&text) {
        Err(Error::Json(e)) => assert_eq!((e.line(), e.column()), (3, 24)),
        other => panic!("{other:?}"),
    }
    let wrong = "{\"schema\": \"other\", \"target\": {\"rank\": 1, \"pairing\": [[1]]}, \"entries\": []}";
    assert!(matches!(CorrelatorTable::from_json_str(wrong), Err(Error::Table(_))));
}

#[test]
fn table_rejects_floats() {
    let text = format!(
        "{{\"schema\": \"{TABLE_SCHEMA}\", \"target\": {{\"rank\": 1, \"pairing\": [[1]]}}, \"entries\": [\
         {{\"genus\": 0, \"cycle_type\": [3], \"slots\": [{{\"r\":1,\"exponent\":0,\"basis\":0}},{{\"r\":1,\"exponent\":0,\"basis\":0}},{{\"r\":1,\"exponent\":0,\"basis\":0}}], \"value\": 1.0}}]}}"
    );
    assert!(CorrelatorTable::from_json_str(&text).is_err());
}

fn exponents(max_len: usize) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(-3i32..=3, 3..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn string_equation(ks in exponents(6)) {
        let point = PointBackend::default();
        let mut full = vec![0];
        full.extend_from_slice(&ks);
        prop_assert_eq!(point.exponent_value(&full), point_string_rhs(&point, &ks));
    }

    #[test]
    fn dilaton_equation(ks in exponents(6)) {
        let point = PointBackend::default();
        let mut full = vec![1];
        full.extend_from_slice(&ks);
        prop_assert_eq!(point.exponent_value(&full), point_dilaton_rhs(&point, &ks));
    }

    #[test]
    fn correlators_are_symmetric(ks in exponents(7), seed in any::<u64>()) {
        let point = PointBackend::default();
        let mut perm = ks.clone();
        let len = perm.len();
        perm.rotate_left((seed as usize) % len);
        perm.swap(0, (seed as usize / 7) % len);
        prop_assert_eq!(point.exponent_value(&ks), point.exponent_value(&perm));
    }

    #[test]
    fn memoization_is_transparent(ks in exponents(7)) {
        let cached = PointBackend::new(true);
        let plain = PointBackend::new(false);
        let first = cached.exponent_value(&ks);
        prop_assert_eq!(&first, &plain.exponent_value(&ks));
        prop_assert_eq!(first, cached.exponent_value(&ks));
    }

    #[test]
    fn keys_are_canonical(ks in exponents(5)) {
        let slots: Vec<Slot> = ks.iter().map(|k| Slot::new(1, *k, 0)).collect();
        let mut rev = slots.clone();
        rev.reverse();
        prop_assert_eq!(CorrelatorKey::new(0, 0, slots), CorrelatorKey::new(0, 0, rev));
    }
}

#[test]
fn point_values() {
    let point = PointBackend::default();
    assert_eq!(point.exponent_value(&[0, 0, 0]).to_string(), "1");
    assert_eq!(point.exponent_value(&[1, 0, 0, 0]).to_string(), "2");
    // L^{-1} = 1 - u + u^2 - ..., and <1,1,1,1> = <u,1,1,1> = 1
    assert_eq!(point.exponent_value(&[-1, 0, 0, 0]).to_string(), "0");
}
