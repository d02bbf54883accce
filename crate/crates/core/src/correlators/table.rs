use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num::{BigRational, One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::key::{CorrelatorKey, CycleType, Slot};
use super::point::PointBackend;
use crate::error::{Error, Result};
use crate::qfun::TargetBasis;
use crate::ring::{binomial, CycloRational};

pub const TABLE_SCHEMA: &str = "qkrec-table-v1";

/// Name under which run specs refer to [`bundled_point_table`].
pub const BUNDLED_POINT_NAME: &str = "bundled:point";

/// The point-target table shipped with the crate, regenerated by `examples/regen_table.rs`.
pub const BUNDLED_POINT_TABLE: &str = include_str!("../../data/point_table.json");

pub fn bundled_point_table() -> Result<CorrelatorTable> {
    CorrelatorTable::from_json_str(BUNDLED_POINT_TABLE)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableValue {
    pub value: CycloRational,
    pub provenance: String,
}

/// Immutable store of base correlators.
#[derive(Debug, Clone)]
pub struct CorrelatorTable {
    target: TargetBasis,
    entries: BTreeMap<CorrelatorKey, TableValue>,
    checksum: String,
}

#[derive(Serialize, Deserialize)]
struct TargetRepr {
    rank: usize,
    pairing: Vec<Vec<Value>>,
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    genus: u32,
    cycle_type: Vec<u32>,
    #[serde(default)]
    degree: u32,
    slots: Vec<Slot>,
    value: CycloRational,
    #[serde(default)]
    provenance: String,
}

#[derive(Deserialize)]
struct FileRepr {
    schema: String,
    target: TargetRepr,
    entries: Vec<EntryRepr>,
}

fn scalar_from_json(v: &Value) -> Result<CycloRational> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(CycloRational::from_int)
            .ok_or_else(|| Error::Table(format!("pairing entry {n} is not an exact integer; use a string"))),
        Value::String(s) => CycloRational::parse(s),
        Value::Array(parts) => {
            let parts: Option<Vec<String>> = parts.iter().map(|p| p.as_str().map(str::to_owned)).collect();
            CycloRational::from_tuple(&parts.ok_or_else(|| Error::Table("tuple entries must be strings".into()))?)
        }
        other => Err(Error::Table(format!("unexpected pairing entry {other}"))),
    }
}

fn scalar_to_json(c: &CycloRational) -> Value {
    match c.as_rational() {
        Some(r) if r.is_integer() => r
            .to_integer()
            .to_string()
            .parse::<i64>()
            .map(Value::from)
            .unwrap_or_else(|_| serde_json::to_value(c).expect("serializable")),
        _ => serde_json::to_value(c).expect("serializable"),
    }
}

impl CorrelatorTable {
    pub fn new(target: TargetBasis) -> Self {
        let mut t = Self {
            target,
            entries: BTreeMap::new(),
            checksum: String::new(),
        };
        t.checksum = sha256_hex(t.to_json().as_bytes());
        t
    }

    pub fn from_entries(
        target: TargetBasis,
        entries: impl IntoIterator<Item = (CorrelatorKey, TableValue)>,
    ) -> Result<Self> {
        let mut t = Self::new(target);
        for (k, v) in entries {
            t.insert_checked(k, v)?;
        }
        t.checksum = sha256_hex(t.to_json().as_bytes());
        Ok(t)
    }

    fn insert_checked(&mut self, key: CorrelatorKey, v: TableValue) -> Result<()> {
        if key.is_unstable() {
            return Err(Error::Table(format!("unstable entry {key}")));
        }
        if let Some(s) = key.slots().iter().find(|s| s.r == 0 || s.basis >= self.target.rank()) {
            return Err(Error::Table(format!("bad slot {s:?} in {key}")));
        }
        match self.entries.get(&key) {
            Some(old) if old.value != v.value => Err(Error::Table(format!("conflicting values for {key}"))),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(key, v);
                Ok(())
            }
        }
    }

    /// Parses a `qkrec-table-v1` document; the checksum is taken over the raw text.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: FileRepr = serde_json::from_str(text)?;
        if file.schema != TABLE_SCHEMA {
            return Err(Error::Table(format!("unknown schema {:?}", file.schema)));
        }
        let pairing = file
            .target
            .pairing
            .iter()
            .map(|row| row.iter().map(scalar_from_json).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let target = TargetBasis::new(pairing)?;
        if target.rank() != file.target.rank {
            return Err(Error::Table("target rank does not match pairing size".into()));
        }
        let mut t = Self::new(target);
        for e in file.entries {
            let key = CorrelatorKey::new(e.genus, e.degree, e.slots);
            if key.cycle_type() != CycleType::new(e.cycle_type.clone()) {
                return Err(Error::Table(format!(
                    "cycle type {:?} does not match slots of {key}",
                    e.cycle_type
                )));
            }
            t.insert_checked(
                key,
                TableValue {
                    value: e.value,
                    provenance: e.provenance,
                },
            )?;
        }
        t.checksum = sha256_hex(text.as_bytes());
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Canonical serialization: one entry per line, keys in sorted order.
    pub fn to_json(&self) -> String {
        let target = TargetRepr {
            rank: self.target.rank(),
            pairing: self
                .target
                .pairing()
                .iter()
                .map(|row| row.iter().map(scalar_to_json).collect())
                .collect(),
        };
        let mut out = String::new();
        let _ = writeln!(out, "{{");
        let _ = writeln!(out, "  \"schema\": \"{TABLE_SCHEMA}\",");
        let _ = writeln!(out, "  \"target\": {},", serde_json::to_string(&target).expect("serializable"));
        let _ = write!(out, "  \"entries\": [");
        for (i, (k, v)) in self.entries.iter().enumerate() {
            let e = EntryRepr {
                genus: k.genus,
                cycle_type: k.cycle_type().into(),
                degree: k.degree,
                slots: k.slots().to_vec(),
                value: v.value.clone(),
                provenance: v.provenance.clone(),
            };
            let sep = if i == 0 { "" } else { "," };
            let _ = write!(out, "{sep}\n    {}", serde_json::to_string(&e).expect("serializable"));
        }
        let _ = writeln!(out, "\n  ]");
        let _ = writeln!(out, "}}");
        out
    }

    pub fn target(&self) -> &TargetBasis {
        &self.target
    }

    pub fn get(&self, key: &CorrelatorKey) -> Option<&TableValue> {
        self.entries.get(key)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&CorrelatorKey, &TableValue)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Hex sha256 of the source text (or of the canonical form for built tables).
    pub fn checksum(&self) -> &str {
        &self.checksum
    }

    /// Combines several tables over the same target; later tables may not contradict earlier ones.
    pub fn merge(tables: &[CorrelatorTable]) -> Result<CorrelatorTable> {
        let Some(first) = tables.first() else {
            return Ok(CorrelatorTable::new(TargetBasis::point()));
        };
        let mut out = Self::new(first.target.clone());
        for t in tables {
            if t.target.pairing() != first.target.pairing() {
                return Err(Error::Table("tables disagree on the target pairing".into()));
            }
            for (k, v) in &t.entries {
                out.insert_checked(k.clone(), v.clone())?;
            }
        }
        out.checksum = sha256_hex(out.to_json().as_bytes());
        Ok(out)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Shape of the synthetic point-target fixture.
#[derive(Debug, Clone, Copy)]
pub struct FixtureBounds {
    /// Maximal number of cycles in a genus-0 entry.
    pub max_cycles_g0: u32,
    /// Maximal number of cycles in a genus-1 entry.
    pub max_cycles_g1: u32,
    /// Largest descendant exponent on the (single) non-constant level-1 slot.
    pub max_exponent: i32,
}

impl Default for FixtureBounds {
    fn default() -> Self {
        Self {
            max_cycles_g0: 6,
            max_cycles_g1: 4,
            max_exponent: 12,
        }
    }
}

pub const FIXTURE_PROVENANCE: &str = "synthetic fixture";

/// Genus-1 normalization of the synthetic fixture.
pub fn fixture_genus_constant(genus: u32) -> BigRational {
    match genus {
        0 => BigRational::one(),
        _ => BigRational::new(1.into(), 24.into()),
    }
}

/// Value of the synthetic fixture on a key of the point target.
///
/// With `a` level-1 slots and `e = a - 3 + 2g`, the level-1 slots are
/// evaluated as `<u^{j_1}, ..., u^{j_a}> = [y^j] (1 + sum y)^e`, scaled by
/// `prod_r r^{-l_r}` and a genus constant. Higher-level slots must be constant.
/// This reproduces the point backend on pure level-1 genus-0 keys and obeys
/// the level-1 string equation and a dilaton equation with factor `a - 2 + 2g`.
pub fn fixture_value(key: &CorrelatorKey) -> Option<BigRational> {
    if key.degree > 0 {
        return Some(BigRational::zero());
    }
    if key.slots().iter().any(|s| s.basis != 0 || (s.r > 1 && s.exponent != 0)) {
        return None;
    }
    let ks: Vec<i32> = key.slots().iter().filter(|s| s.r == 1).map(|s| s.exponent).collect();
    let e = ks.len() as i64 - 3 + 2 * i64::from(key.genus);
    if e < 0 && ks.iter().any(|k| *k < 0) {
        return None;
    }
    // sum over j of prod_i C(k_i, j_i) * (e)_J / prod j_i!, i.e. prod C(k_i, j_i) C(e, J) J!/prod j_i!
    // = coefficient extraction; done by polynomial multiplication in one variable y.
    let max_j: usize = if e >= 0 {
        e as usize
    } else {
        ks.iter().map(|k| (*k).max(0) as usize).sum()
    };
    let mut poly = vec![BigRational::zero(); max_j + 1];
    poly[0] = BigRational::one();
    for k in &ks {
        let mut next = vec![BigRational::zero(); max_j + 1];
        for (a, pa) in poly.iter().enumerate() {
            if pa.is_zero() {
                continue;
            }
            for j in 0..=(max_j - a) {
                // u^j contributes y^j / j!
                let c = binomial(i64::from(*k), j as u32) / BigRational::from_integer(super::key::factorial(j as u32));
                next[a + j] += pa * c;
            }
        }
        poly = next;
    }
    let mut acc = BigRational::zero();
    for (jj, c) in poly.iter().enumerate() {
        // (e)_J = J! C(e, J)
        acc += c * binomial(e, jj as u32) * BigRational::from_integer(super::key::factorial(jj as u32));
    }
    Some(acc * key.cycle_type().cycle_weight() * fixture_genus_constant(key.genus))
}

fn cycle_types(levels: &[u32], max_cycles: u32) -> Vec<CycleType> {
    let mut out = Vec::new();
    let max_level = *levels.iter().max().unwrap_or(&1) as usize;
    let mut counts = vec![0u32; max_level];
    fn rec(levels: &[u32], i: usize, left: u32, counts: &mut Vec<u32>, out: &mut Vec<CycleType>) {
        if i == levels.len() {
            out.push(CycleType::new(counts.clone()));
            return;
        }
        for c in 0..=left {
            counts[levels[i] as usize - 1] = c;
            rec(levels, i + 1, left - c, counts, out);
        }
        counts[levels[i] as usize - 1] = 0;
    }
    rec(levels, 0, max_cycles, &mut counts, &mut out);
    out
}

fn constant_slots(l: &CycleType) -> Vec<Slot> {
    let mut slots = Vec::new();
    for (i, c) in l.counts().iter().enumerate() {
        for _ in 0..*c {
            slots.push(Slot::new(i as u32 + 1, 0, 0));
        }
    }
    slots
}

/// The synthetic point-target table: equivariant genus-0 and all genus-1 keys
/// (pure level-1 genus-0 keys come from the point backend).
pub fn fixture_point_table(bounds: FixtureBounds) -> CorrelatorTable {
    let mut keys = Vec::new();
    let mut shapes: Vec<(u32, CycleType)> = Vec::new();
    for l in cycle_types(&[1, 2, 3], bounds.max_cycles_g0) {
        if l.max_length() > 1 {
            shapes.push((0, l));
        }
    }
    for extra in [4u32, 6] {
        for l in cycle_types(&[1, 2, 3], bounds.max_cycles_g0 - 1) {
            shapes.push((0, l.add(&CycleType::single(extra))));
        }
    }
    for l in cycle_types(&[1, 2, 3], bounds.max_cycles_g1) {
        shapes.push((1, l));
    }
    for (g, l) in shapes {
        let base = CorrelatorKey::new(g, 0, constant_slots(&l));
        if base.is_unstable() {
            continue;
        }
        keys.push(base.clone());
        if l.count(1) > 0 {
            let i = base.slots().iter().position(|s| s.r == 1).expect("level-1 slot");
            for k in 1..=bounds.max_exponent {
                keys.push(base.replace(i, Slot::new(1, k, 0)));
            }
        }
    }
    let entries = keys.into_iter().map(|k| {
        let v = fixture_value(&k).expect("fixture keys are in range");
        (
            k,
            TableValue {
                value: CycloRational::from_rational(v),
                provenance: FIXTURE_PROVENANCE.into(),
            },
        )
    });
    CorrelatorTable::from_entries(TargetBasis::point(), entries).expect("fixture keys are valid")
}

/// Outcome of checking string and dilaton equations among table rows.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub checked: usize,
    pub skipped: usize,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub equation: &'static str,
    pub key: String,
    pub expected: CycloRational,
    pub found: CycloRational,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Expands `D L^k = (L^k - 1)/(L - 1)` into exponents with signs.
fn d_monomial(k: i32) -> Vec<(i32, i64)> {
    if k > 0 {
        (0..k).map(|m| (m, 1)).collect()
    } else {
        (k..0).map(|m| (m, -1)).collect()
    }
}

/// Checks the level-1 string equation (genus 0 and 1) and the genus-0
/// dilaton equation on every instance whose ingredients are available.
pub fn validate_table(table: &CorrelatorTable, point: &PointBackend) -> ValidationReport {
    let lookup = |k: &CorrelatorKey| -> Option<CycloRational> {
        if k.is_unstable() {
            return Some(CycloRational::zero());
        }
        if let Some(v) = table.get(k) {
            return Some(v.value.clone());
        }
        if table.target().is_point() && k.genus == 0 && k.is_level_one() {
            if k.degree > 0 {
                return Some(CycloRational::zero());
            }
            let ks: Vec<i32> = k.slots().iter().map(|s| s.exponent).collect();
            return Some(CycloRational::from_rational(point.exponent_value(&ks)));
        }
        None
    };
    let mut report = ValidationReport::default();
    let unit = table.target().is_point().then_some(0usize);
    for (key, entry) in table.entries() {
        let Some(unit) = unit else { break };
        // string equation: remove a constant unit level-1 slot
        if let Some(i) = key
            .slots()
            .iter()
            .position(|s| s.r == 1 && s.exponent == 0 && s.basis == unit)
        {
            let rest = key.without(i);
            if !rest.is_unstable() {
                let mut expected = lookup(&rest);
                for (j, s) in rest.slots().iter().enumerate() {
                    if s.r != 1 {
                        continue;
                    }
                    for (m, sign) in d_monomial(s.exponent) {
                        let term = lookup(&rest.replace(j, Slot::new(1, m, s.basis)));
                        expected = match (expected, term) {
                            (Some(a), Some(b)) => Some(&a + &b.scale(&BigRational::from_integer(sign.into()))),
                            _ => None,
                        };
                    }
                }
                match expected {
                    Some(exp) => {
                        report.checked += 1;
                        if exp != entry.value {
                            report.violations.push(Violation {
                                equation: "string",
                                key: key.to_string(),
                                expected: exp,
                                found: entry.value.clone(),
                            });
                        }
                    }
                    None => report.skipped += 1,
                }
            }
        }
        // dilaton equation (genus 0): <L, rest> = (l_1(rest) - 2) <rest> + <1, rest>
        if key.genus == 0 {
            if let Some(i) = key.slots().iter().position(|s| s.r == 1 && s.exponent == 1 && s.basis == unit) {
                let rest = key.without(i);
                let l1 = rest.slots().iter().filter(|s| s.r == 1).count() as i64;
                let with_one = key.replace(i, Slot::new(1, 0, unit));
                match (lookup(&rest), lookup(&with_one)) {
                    (Some(a), Some(b)) if !rest.is_unstable() => {
                        report.checked += 1;
                        let exp = &a.scale(&BigRational::from_integer((l1 - 2).into())) + &b;
                        if exp != entry.value {
                            report.violations.push(Violation {
                                equation: "dilaton",
                                key: key.to_string(),
                                expected: exp,
                                found: entry.value.clone(),
                            });
                        }
                    }
                    _ => report.skipped += 1,
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(g: u32, slots: &[(u32, i32)]) -> CorrelatorKey {
        CorrelatorKey::new(g, 0, slots.iter().map(|(r, k)| Slot::new(*r, *k, 0)).collect())
    }

    fn entry(v: i64) -> TableValue {
        TableValue {
            value: CycloRational::from_int(v),
            provenance: "test".into(),
        }
    }

    #[test]
    fn fixture_matches_point_backend_on_level_one() {
        let p = PointBackend::default();
        for ks in [vec![0, 0, 0], vec![3, 0, 1, 2], vec![1, 1, 0, 0, 0], vec![4, 0, 0, 0, 0, 2]] {
            let k = key(0, &ks.iter().map(|e| (1, *e)).collect::<Vec<_>>());
            assert_eq!(fixture_value(&k).unwrap(), p.exponent_value(&ks), "{k}");
        }
    }

    #[test]
    fn fixture_small_equivariant_value() {
        // <L - 1 ; 1_2>_0 = -1
        let a = fixture_value(&key(0, &[(1, 1), (2, 0)])).unwrap();
        let b = fixture_value(&key(0, &[(1, 0), (2, 0)])).unwrap();
        assert_eq!(a - b, BigRational::from_integer((-1).into()));
    }

    #[test]
    fn fixture_table_validates() {
        let t = fixture_point_table(FixtureBounds {
            max_cycles_g0: 5,
            max_cycles_g1: 4,
            max_exponent: 4,
        });
        let report = validate_table(&t, &PointBackend::default());
        assert!(report.is_valid(), "{:?}", &report.violations[..report.violations.len().min(3)]);
        assert!(report.checked > 100);
    }

    #[test]
    fn json_round_trip_preserves_entries() {
        let t = fixture_point_table(FixtureBounds {
            max_cycles_g0: 4,
            max_cycles_g1: 2,
            max_exponent: 2,
        });
        let text = t.to_json();
        let back = CorrelatorTable::from_json_str(&text).unwrap();
        assert_eq!(back.len(), t.len());
        assert_eq!(back.to_json(), text);
        assert_eq!(back.checksum(), sha256_hex(text.as_bytes()));
    }

    #[test]
    fn empty_table_is_valid() {
        let t = CorrelatorTable::new(TargetBasis::point());
        assert!(validate_table(&t, &PointBackend::default()).is_valid());
    }

    #[test]
    fn string_violation_is_reported() {
        let t = CorrelatorTable::from_entries(
            TargetBasis::point(),
            [(key(0, &[(1, 0); 3]), entry(1)), (key(0, &[(1, 0); 4]), entry(5))],
        )
        .unwrap();
        let report = validate_table(&t, &PointBackend::default());
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].equation, "string");
        assert_eq!(report.violations[0].expected, CycloRational::one());
    }

    #[test]
    fn dilaton_violation_is_reported() {
        // <L, 1, 1, 1> should be (3 - 2) <1, 1, 1> + <1, 1, 1, 1> = 2
        let t = CorrelatorTable::from_entries(TargetBasis::point(), [(key(0, &[(1, 1), (1, 0), (1, 0), (1, 0)]), entry(3))])
            .unwrap();
        let report = validate_table(&t, &PointBackend::default());
        assert!(report.violations.iter().any(|v| v.equation == "dilaton"));
    }

    #[test]
    fn malformed_tables_are_rejected() {
        assert!(CorrelatorTable::from_json_str("{\"schema\": \"other\", \"target\": {\"rank\": 1, \"pairing\": [[1]]}, \"entries\": []}").is_err());
        let unstable = r#"{"schema": "qkrec-table-v1", "target": {"rank": 1, "pairing": [[1]]},
            "entries": [{"genus": 0, "cycle_type": [2], "degree": 0, "slots": [{"r": 1, "exponent": 0, "basis": 0}, {"r": 1, "exponent": 0, "basis": 0}], "value": "1", "provenance": ""}]}"#;
        assert!(CorrelatorTable::from_json_str(unstable).is_err());
        let mismatch = r#"{"schema": "qkrec-table-v1", "target": {"rank": 1, "pairing": [[1]]},
            "entries": [{"genus": 1, "cycle_type": [2], "degree": 0, "slots": [{"r": 2, "exponent": 0, "basis": 0}], "value": "1"}]}"#;
        assert!(CorrelatorTable::from_json_str(mismatch).is_err());
        match CorrelatorTable::from_json_str("{\n  \"schema\": ,") {
            Err(Error::Json(e)) => assert_eq!(e.line(), 2),
            other => panic!("{other:?}"),
        }
    }
}
