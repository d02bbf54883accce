use std::collections::BTreeSet;
use std::sync::Mutex;

use num::{BigInt, BigRational, One};
use serde::Serialize;

use super::key::{factorial, CorrelatorKey, CycleType, Slot};
use super::point::PointBackend;
use super::table::CorrelatorTable;
use crate::error::{Error, Result};
use crate::qfun::{KVector, LaurentQ, RationalQ, TargetBasis};
use crate::ring::{CycloRational, Ring, Series, NOVIKOV_NAME};

/// `tau = (tau_1, ..., tau_{r_max})`; levels past `r_max` are zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct TauVector {
    levels: Vec<KVector>,
}

impl TauVector {
    pub fn zero(ring: &Ring, rank: usize, r_max: u32) -> Self {
        Self {
            levels: (0..r_max).map(|_| KVector::zero(ring, rank)).collect(),
        }
    }

    pub fn from_levels(levels: Vec<KVector>) -> Self {
        Self { levels }
    }

    pub fn r_max(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn levels(&self) -> &[KVector] {
        &self.levels
    }

    /// `tau_r`, or `None` when it is zero or out of range.
    pub fn level(&self, r: u32) -> Option<&KVector> {
        self.levels.get(r as usize - 1).filter(|v| !v.is_zero())
    }

    pub fn set(&mut self, r: u32, v: KVector) {
        self.levels[r as usize - 1] = v;
    }

    /// Minimal filtration order over all levels; `None` for `tau = 0`.
    pub fn filtration_order(&self) -> Option<u32> {
        self.levels.iter().filter_map(KVector::filtration_order).min()
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(KVector::is_zero)
    }

    pub fn sub(&self, other: &TauVector) -> TauVector {
        Self {
            levels: self.levels.iter().zip(&other.levels).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Input on an `r`-cycle: a Laurent polynomial in the cotangent line class.
#[derive(Debug, Clone)]
pub struct Insertion {
    pub r: u32,
    pub content: LaurentQ,
}

impl Insertion {
    pub fn new(r: u32, content: LaurentQ) -> Self {
        assert!(r >= 1, "cycle length must be positive");
        Self { r, content }
    }

    /// A constant class on an `r`-cycle.
    pub fn constant(r: u32, v: KVector) -> Self {
        Self::new(r, LaurentQ::constant(v))
    }
}

/// Correlator source: exact point recursion plus a table, with batch
/// recording of keys the table does not cover.
#[derive(Debug)]
pub struct Backend {
    table: CorrelatorTable,
    point: PointBackend,
    cycle_weight_in_brackets: bool,
    missing: Mutex<BTreeSet<CorrelatorKey>>,
}

type Term = (Series, Vec<Slot>);

impl Backend {
    pub fn new(table: CorrelatorTable, cycle_weight_in_brackets: bool) -> Self {
        Self::with_point(table, PointBackend::default(), cycle_weight_in_brackets)
    }

    pub fn with_point(table: CorrelatorTable, point: PointBackend, cycle_weight_in_brackets: bool) -> Self {
        Self {
            table,
            point,
            cycle_weight_in_brackets,
            missing: Mutex::new(BTreeSet::new()),
        }
    }

    pub fn target(&self) -> &TargetBasis {
        self.table.target()
    }

    pub fn table(&self) -> &CorrelatorTable {
        &self.table
    }

    pub fn point(&self) -> &PointBackend {
        &self.point
    }

    pub fn cycle_weight_in_brackets(&self) -> bool {
        self.cycle_weight_in_brackets
    }

    /// Value of a base correlator; absent table keys count as zero and are recorded.
    pub fn correlator(&self, key: &CorrelatorKey) -> CycloRational {
        if key.is_unstable() {
            return CycloRational::zero();
        }
        let point = self.target().is_point();
        if point && key.degree > 0 {
            return CycloRational::zero();
        }
        if point && key.genus == 0 && key.is_level_one() {
            let ks: Vec<i32> = key.slots().iter().map(|s| s.exponent).collect();
            return CycloRational::from_rational(self.point.exponent_value(&ks));
        }
        match self.table.get(key) {
            Some(v) => v.value.clone(),
            None => {
                self.missing.lock().expect("poisoned").insert(key.clone());
                CycloRational::zero()
            }
        }
    }

    /// Genus-1 table lookup that fails on the first absent key.
    pub fn g1_base_correlator(&self, key: &CorrelatorKey) -> Result<CycloRational> {
        if key.genus != 1 {
            return Err(Error::InvalidConfig(format!("{key} is not a genus-1 key")));
        }
        if key.is_unstable() {
            return Ok(CycloRational::zero());
        }
        if self.target().is_point() && key.degree > 0 {
            return Ok(CycloRational::zero());
        }
        self.table
            .get(key)
            .map(|v| v.value.clone())
            .ok_or_else(|| Error::MissingEntries(vec![key.clone()]))
    }

    /// Drains the missing-key log; an error lists every key at once.
    pub fn take_missing(&self) -> Result<()> {
        let missing = std::mem::take(&mut *self.missing.lock().expect("poisoned"));
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::MissingEntries(missing.into_iter().collect()))
        }
    }

    /// `1/l! * prod r^{-l_r}` (the latter only with `cycle_weight_in_brackets`).
    pub fn bracket_weight(&self, l: &CycleType) -> BigRational {
        let mut w = BigRational::new(BigInt::one(), l.factorial());
        if self.cycle_weight_in_brackets {
            w *= l.cycle_weight();
        }
        w
    }

    /// `<<A_1, ..., A_m>>_{g}` with `tau` insertions, after applying `R_shift`:
    /// the `k`-cycle insertions of `tau` use `tau_{k * shift}` and `Q^d -> Q^{shift * d}`.
    pub fn double_bracket(&self, genus: u32, inputs: &[Insertion], tau: &TauVector, shift: u32) -> Result<Series> {
        let ring = tau.levels.first().map(|v| v.ring().clone()).or_else(|| inputs.first().map(|i| i.content.ring().clone()));
        let ring = ring.ok_or_else(|| Error::InvalidConfig("empty bracket without a ring".into()))?;
        let rank = self.target().rank();
        let n = ring.order();
        let mut used = 0u32;
        for a in inputs {
            if a.content.rank() != rank {
                return Err(Error::BasisMismatch(format!(
                    "insertion of rank {} against target of rank {rank}",
                    a.content.rank()
                )));
            }
            match a.content.filtration_order() {
                None => return Ok(Series::zero(&ring)),
                Some(o) => used += o,
            }
        }
        if used > n {
            return Ok(Series::zero(&ring));
        }
        let budget = n - used;

        // effective tau levels with their orders
        let mut levels: Vec<(u32, &KVector, u32)> = Vec::new();
        for k in 1..=tau.r_max() {
            if k * shift > tau.r_max() {
                break;
            }
            if let Some(v) = tau.level(k * shift) {
                let o = v.filtration_order().unwrap_or(n + 1);
                if o == 0 {
                    return Err(Error::InvalidConfig(format!("tau_{} is not in the maximal ideal", k * shift)));
                }
                if o <= budget {
                    levels.push((k, v, o));
                }
            }
        }

        let input_terms: Vec<Vec<Term>> = inputs.iter().map(|a| expand_insertion(a)).collect();
        let mut fixed = Vec::new();
        product_terms(&input_terms, 0, (Series::one(&ring), Vec::new()), &mut fixed);

        let max_degree = if ring.novikov_enabled() && !self.target().is_point() {
            n
        } else {
            0
        };
        let q = if ring.novikov_enabled() {
            Some(Series::var(&ring, NOVIKOV_NAME)?)
        } else {
            None
        };

        let mut acc = Series::zero(&ring);
        let mut counts = vec![0u32; levels.len()];
        loop {
            let lbar = CycleType::new({
                let mut v = vec![0u32; tau.r_max() as usize];
                for ((k, _, _), c) in levels.iter().zip(&counts) {
                    v[*k as usize - 1] = *c;
                }
                v
            });
            let weight = CycloRational::from_rational(self.bracket_weight(&lbar));
            let mut tau_terms: Vec<Vec<Term>> = Vec::new();
            for ((k, v, _), c) in levels.iter().zip(&counts) {
                tau_terms.push(symmetric_power(*k, v, *c));
            }
            let mut taus = Vec::new();
            product_terms(&tau_terms, 0, (Series::one(&ring), Vec::new()), &mut taus);
            for d in 0..=max_degree {
                let qd = match &q {
                    Some(q) if d > 0 => q.pow(d * shift),
                    _ => Series::one(&ring),
                };
                if qd.is_zero() {
                    continue;
                }
                for (cf, sf) in &fixed {
                    for (ct, st) in &taus {
                        let coeff = cf * ct;
                        if coeff.is_zero() {
                            continue;
                        }
                        let mut slots = sf.clone();
                        slots.extend_from_slice(st);
                        let value = self.correlator(&CorrelatorKey::new(genus, d, slots));
                        if value.is_zero() {
                            continue;
                        }
                        acc += &(&coeff * &qd).scale(&(&value * &weight));
                    }
                }
            }
            // next cycle type within the budget
            let mut i = 0;
            loop {
                if i == counts.len() {
                    return Ok(acc);
                }
                counts[i] += 1;
                let spent: u32 = levels.iter().zip(&counts).map(|((_, _, o), c)| o * c).sum();
                if spent <= budget {
                    break;
                }
                counts[i] = 0;
                i += 1;
            }
        }
    }

    /// `sum_{lbar} w(lbar) prod_r (tau_r^0)^{lbar_r}` over nonzero-free levels:
    /// the factor by which constant unit `tau`-insertions dress a genus-1 ancestor
    /// bracket of the point target (`ft_* O = O`).
    pub fn ancestor_dressing(&self, tau: &TauVector) -> Result<Series> {
        if !self.target().is_point() {
            return Err(Error::Unsupported("ancestor brackets beyond the point target".into()));
        }
        let ring = tau
            .levels
            .first()
            .map(|v| v.ring().clone())
            .ok_or_else(|| Error::InvalidConfig("tau without levels".into()))?;
        let mut acc = Series::one(&ring);
        for (i, v) in tau.levels.iter().enumerate() {
            let r = i as u64 + 1;
            let x = v.comp(0);
            if x.is_zero() {
                continue;
            }
            let scale = if self.cycle_weight_in_brackets {
                CycloRational::from_frac(1, r as i64)
            } else {
                CycloRational::one()
            };
            acc = &acc * &x.scale(&scale).exp_nilpotent()?;
        }
        Ok(acc)
    }
}

fn expand_insertion(a: &Insertion) -> Vec<Term> {
    let mut out = Vec::new();
    for (e, v) in a.content.terms() {
        for (alpha, c) in v.comps().iter().enumerate() {
            if !c.is_zero() {
                out.push((c.clone(), vec![Slot::new(a.r, e, alpha)]));
            }
        }
    }
    out
}

fn product_terms(factors: &[Vec<Term>], i: usize, acc: Term, out: &mut Vec<Term>) {
    if i == factors.len() {
        out.push(acc);
        return;
    }
    for (c, s) in &factors[i] {
        let coeff = &acc.0 * c;
        if coeff.is_zero() {
            continue;
        }
        let mut slots = acc.1.clone();
        slots.extend_from_slice(s);
        product_terms(factors, i + 1, (coeff, slots), out);
    }
}

/// `tau^{count}` on `k`-cycles, expanded over basis multisets with multinomial weights.
fn symmetric_power(k: u32, v: &KVector, count: u32) -> Vec<Term> {
    let ring = v.ring();
    let rank = v.rank();
    let mut out = Vec::new();
    let mut m = vec![0u32; rank];
    fn rec(k: u32, v: &KVector, left: u32, i: usize, m: &mut Vec<u32>, count: u32, ring: &Ring, out: &mut Vec<Term>) {
        if i + 1 == m.len() {
            m[i] = left;
            let mut coeff = Series::constant(
                ring,
                CycloRational::from_rational(BigRational::from_integer(
                    factorial(count) / m.iter().map(|c| factorial(*c)).product::<BigInt>(),
                )),
            );
            let mut slots = Vec::new();
            for (alpha, c) in m.iter().enumerate() {
                if *c > 0 {
                    coeff = &coeff * &v.comp(alpha).pow(*c);
                }
                for _ in 0..*c {
                    slots.push(Slot::new(k, 0, alpha));
                }
            }
            if !coeff.is_zero() {
                out.push((coeff, slots));
            }
            return;
        }
        for c in 0..=left {
            m[i] = c;
            rec(k, v, left - c, i + 1, m, count, ring, out);
        }
    }
    rec(k, v, count, 0, &mut m, count, ring, &mut out);
    out
}

/// `sum_k c_k z^k` for a sequence that is polynomial in `k` from `k0` on.
#[derive(Debug, Clone)]
pub struct Resummed {
    /// `c_0, ..., c_{k0 - 1}`.
    pub prefix: Vec<KVector>,
    pub k0: usize,
    /// Newton coefficients: `c_{k0 + m} = sum_j newton[j] C(m, j)`.
    pub newton: Vec<KVector>,
}

pub const MAX_RESUM_TERMS: usize = 24;
const VERIFY_MARGIN: usize = 3;
const MAX_K0: usize = 3;

/// Fits `c_k` by an eventually-polynomial pattern and checks it on `VERIFY_MARGIN` further terms.
pub fn resum(mut c: impl FnMut(usize) -> Result<KVector>, max_terms: usize) -> Result<Resummed> {
    let mut terms: Vec<KVector> = Vec::new();
    let mut target = 8.min(max_terms);
    loop {
        while terms.len() < target {
            terms.push(c(terms.len())?);
        }
        for k0 in 0..=MAX_K0.min(terms.len()) {
            let window = &terms[k0..];
            let mut diffs: Vec<Vec<KVector>> = vec![window.to_vec()];
            for d in 0..window.len() {
                let last = diffs.last().expect("nonempty");
                if last.len() < VERIFY_MARGIN + 1 || window.len() < d + 1 + VERIFY_MARGIN {
                    break;
                }
                // degree-d fit holds if the (d+1)-st differences vanish
                let next: Vec<KVector> = last.windows(2).map(|w| &w[1] - &w[0]).collect();
                if next.len() >= VERIFY_MARGIN && next.iter().all(KVector::is_zero) {
                    return Ok(Resummed {
                        prefix: terms[..k0].to_vec(),
                        k0,
                        newton: diffs.iter().map(|row| row[0].clone()).collect(),
                    });
                }
                diffs.push(next);
            }
        }
        if target >= max_terms {
            return Err(Error::ResummationUnstable(target));
        }
        target = (target + 4).min(max_terms);
    }
}

impl Resummed {
    /// `sum_k c_k q^{-k}` as a rational function of `q`.
    pub fn in_inverse_q(&self, ring: &Ring, rank: usize) -> Result<RationalQ> {
        let mut acc = RationalQ::zero(ring, rank);
        for (k, c) in self.prefix.iter().enumerate() {
            acc = &acc + &RationalQ::from_laurent(LaurentQ::monomial(-(k as i32), c.clone()));
        }
        // sum_{k>=k0} C(k - k0, j) q^{-k} = q^{1 - k0} / (q - 1)^{j + 1}
        for (j, a) in self.newton.iter().enumerate() {
            let num = LaurentQ::monomial(1 - self.k0 as i32, a.clone());
            acc = &acc + &RationalQ::with_pole(num, CycloRational::one(), j as u32 + 1)?;
        }
        Ok(acc)
    }

    /// `sum_k c_k x^k` as a rational function of `x`.
    pub fn in_x(&self, ring: &Ring, rank: usize) -> Result<RationalQ> {
        let mut acc = RationalQ::zero(ring, rank);
        for (k, c) in self.prefix.iter().enumerate() {
            acc = &acc + &RationalQ::from_laurent(LaurentQ::monomial(k as i32, c.clone()));
        }
        // sum_{k>=k0} C(k - k0, j) x^k = x^{k0 + j} / (1 - x)^{j + 1}
        for (j, a) in self.newton.iter().enumerate() {
            let sign = if j % 2 == 0 { -1 } else { 1 };
            let num = LaurentQ::monomial((self.k0 + j) as i32, a.scale_c(&CycloRational::from_int(sign)));
            acc = &acc + &RationalQ::with_pole(num, CycloRational::one(), j as u32 + 1)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::SeriesRingConfig;

    fn setup(order: u32) -> (Ring, Backend) {
        let ring = SeriesRingConfig::new(["e"], false, order).unwrap();
        (ring, Backend::new(CorrelatorTable::new(TargetBasis::point()), true))
    }

    fn one(ring: &Ring) -> Insertion {
        Insertion::constant(1, KVector::scalar(Series::one(ring)))
    }

    fn tau_eps(ring: &Ring) -> TauVector {
        TauVector::from_levels(vec![KVector::scalar(Series::var(ring, "e").unwrap())])
    }

    #[test]
    fn two_point_bracket_vanishes_at_zero_tau() {
        let (ring, b) = setup(2);
        let tau = TauVector::zero(&ring, 1, 1);
        assert!(b.double_bracket(0, &[one(&ring), one(&ring)], &tau, 1).unwrap().is_zero());
    }

    #[test]
    fn two_point_bracket_first_orders() {
        let (ring, b) = setup(1);
        let e = Series::var(&ring, "e").unwrap();
        assert_eq!(b.double_bracket(0, &[one(&ring), one(&ring)], &tau_eps(&ring), 1).unwrap(), e);
        let (ring, b) = setup(2);
        let e = Series::var(&ring, "e").unwrap();
        let expect = &e + &(&e * &e).scale(&CycloRational::from_frac(1, 2));
        assert_eq!(b.double_bracket(0, &[one(&ring), one(&ring)], &tau_eps(&ring), 1).unwrap(), expect);
    }

    #[test]
    fn shift_reads_higher_levels() {
        let (ring, b) = setup(1);
        let e = Series::var(&ring, "e").unwrap();
        let tau = TauVector::from_levels(vec![KVector::scalar(Series::zero(&ring)), KVector::scalar(e.clone())]);
        assert!(b.double_bracket(0, &[one(&ring), one(&ring)], &tau, 1).unwrap().is_zero());
        // the 2_1 tau-insertion needs an equivariant entry at shift 1 ...
        assert!(b.take_missing().is_err());
        // ... but R_2 moves tau_2 onto 1-cycles
        assert_eq!(b.double_bracket(0, &[one(&ring), one(&ring)], &tau, 2).unwrap(), e);
        b.take_missing().unwrap();
    }

    #[test]
    fn missing_keys_are_batched() {
        let (ring, b) = setup(1);
        let c = Insertion::constant(2, KVector::scalar(Series::one(&ring)));
        let tau = TauVector::zero(&ring, 1, 1);
        let _ = b.double_bracket(0, &[one(&ring), c.clone()], &tau, 1);
        let _ = b.double_bracket(1, &[c], &tau, 1);
        match b.take_missing() {
            Err(Error::MissingEntries(keys)) => assert_eq!(keys.len(), 2),
            other => panic!("{other:?}"),
        }
        b.take_missing().unwrap();
    }

    #[test]
    fn resummation_of_constant_sequence() {
        let (ring, _) = setup(1);
        let r = resum(|_| Ok(KVector::scalar(Series::one(&ring))), MAX_RESUM_TERMS).unwrap();
        assert_eq!(r.k0, 0);
        // sum_k q^{-k} = q/(q - 1)
        let f = r.in_inverse_q(&ring, 1).unwrap();
        let expect = RationalQ::with_pole(LaurentQ::monomial(1, KVector::scalar(Series::one(&ring))), CycloRational::one(), 1)
            .unwrap();
        assert_eq!(f, expect);
    }

    #[test]
    fn resummation_with_irregular_start() {
        let (ring, _) = setup(1);
        // c_0 = 5, c_k = k^2 for k >= 1
        let seq = |k: usize| {
            let v = if k == 0 { 5 } else { (k * k) as i64 };
            Ok(KVector::scalar(Series::from_int(&ring, v)))
        };
        let r = resum(seq, MAX_RESUM_TERMS).unwrap();
        assert_eq!(r.k0, 1);
        assert_eq!(r.newton.len(), 3);
        let f = r.in_x(&ring, 1).unwrap();
        // compare Taylor coefficients at x = 0
        let taylor = f.expand_at_zero(10);
        for k in 0..=10 {
            let want = if k == 0 { 5 } else { k * k };
            assert_eq!(taylor.get(&k).map(|v| v.comp(0).constant_term()), Some(CycloRational::from_int(want as i64)));
        }
    }

    #[test]
    fn unstable_pattern_is_an_error() {
        let (ring, _) = setup(1);
        let seq = |k: usize| Ok(KVector::scalar(Series::from_int(&ring, 1 << k.min(40))));
        assert!(matches!(resum(seq, 16), Err(Error::ResummationUnstable(_))));
    }
}
