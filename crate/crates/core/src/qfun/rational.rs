//! Rational functions of `q` whose poles sit at `0`, `infinity`, and 12th roots of unity.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Serialize, Serializer};

use super::kvector::KVector;
use super::laurent::LaurentQ;
use crate::error::{Error, Result};
use crate::ring::{binomial, CycloRational, Ring, Series};

/// `numerator / prod_a (q - a)^{m_a}` in lowest terms.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalQ {
    num: LaurentQ,
    den: BTreeMap<CycloRational, u32>,
}

/// Where a residue of `f(x) dx / x` is taken.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ResiduePoint {
    Zero,
    Infinity,
    Root(CycloRational),
}

impl fmt::Display for ResiduePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResiduePoint::Zero => f.write_str("0"),
            ResiduePoint::Infinity => f.write_str("inf"),
            ResiduePoint::Root(a) => write!(f, "{a}"),
        }
    }
}

/// Zeroth and first Taylor coefficients in the local coordinate `q / root - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JetAtRoot {
    pub root: CycloRational,
    pub value: KVector,
    pub derivative: KVector,
}

fn check_root(a: &CycloRational) -> Result<()> {
    if a.is_zero() || a.root_exponent().is_none() {
        return Err(Error::UnrepresentablePole(a.to_string()));
    }
    Ok(())
}

type Coeffs = Vec<CycloRational>;

fn convolve(a: &[CycloRational], b: &[CycloRational], len: usize) -> Coeffs {
    let mut out = vec![CycloRational::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += &(x * y);
        }
    }
    out
}

fn power_series(base: &[CycloRational], m: u32, len: usize) -> Coeffs {
    let mut acc = vec![CycloRational::zero(); len];
    if len > 0 {
        acc[0] = CycloRational::one();
    }
    for _ in 0..m {
        acc = convolve(&acc, base, len);
    }
    acc
}

impl RationalQ {
    pub fn new(num: LaurentQ, den: BTreeMap<CycloRational, u32>) -> Result<Self> {
        for a in den.keys() {
            check_root(a)?;
        }
        let mut out = Self { num, den };
        out.reduce();
        Ok(out)
    }

    pub fn from_laurent(num: LaurentQ) -> Self {
        Self {
            num,
            den: BTreeMap::new(),
        }
    }

    /// `num / (q - a)^m`.
    pub fn with_pole(num: LaurentQ, a: CycloRational, m: u32) -> Result<Self> {
        Self::new(num, BTreeMap::from([(a, m)]))
    }

    pub fn zero(ring: &Ring, rank: usize) -> Self {
        Self::from_laurent(LaurentQ::zero(ring, rank))
    }

    pub fn numerator(&self) -> &LaurentQ {
        &self.num
    }

    pub fn denominator(&self) -> &BTreeMap<CycloRational, u32> {
        &self.den
    }

    pub fn ring(&self) -> &Ring {
        self.num.ring()
    }

    pub fn rank(&self) -> usize {
        self.num.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_laurent(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_laurent(&self) -> Option<&LaurentQ> {
        self.is_laurent().then_some(&self.num)
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (a, m) in self.den.iter_mut() {
            while *m > 0 {
                match self.num.div_linear(a) {
                    Some(q) => {
                        self.num = q;
                        *m -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|_, m| *m > 0);
    }

    fn map_num(&self, f: impl FnOnce(&LaurentQ) -> LaurentQ) -> Self {
        let mut out = Self {
            num: f(&self.num),
            den: self.den.clone(),
        };
        out.reduce();
        out
    }

    pub fn scale(&self, s: &Series) -> Self {
        self.map_num(|n| n.scale(s))
    }

    pub fn scale_c(&self, c: &CycloRational) -> Self {
        self.map_num(|n| n.scale_c(c))
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i32) -> Self {
        self.map_num(|n| n.shift(k))
    }

    pub fn truncated(&self, order: u32) -> Self {
        self.map_num(|n| n.truncated(order))
    }

    /// Applies a `Lambda`-linear map to every coefficient (the denominator is scalar).
    pub fn map_coeffs(&self, rank: usize, f: impl Fn(&KVector) -> KVector) -> Self {
        let mut out = Self {
            num: self.num.map_coeffs_rank(rank, f),
            den: self.den.clone(),
        };
        out.reduce();
        out
    }

    /// Product with a scalar (rank-one) rational function.
    pub fn mul_scalar(&self, s: &RationalQ) -> Self {
        let mut den = self.den.clone();
        for (a, m) in &s.den {
            *den.entry(a.clone()).or_default() += m;
        }
        let mut out = Self {
            num: self.num.mul_scalar(&s.num),
            den,
        };
        out.reduce();
        out
    }

    /// Component `alpha` as a scalar rational function.
    pub fn component(&self, alpha: usize) -> RationalQ {
        let mut out = Self {
            num: self.num.component(alpha),
            den: self.den.clone(),
        };
        out.reduce();
        out
    }

    /// Places a scalar rational function in direction `phi_alpha` of a rank-`rank` space.
    pub fn place(&self, alpha: usize, rank: usize) -> RationalQ {
        assert_eq!(self.rank(), 1, "only scalars can be placed");
        let ring = self.ring().clone();
        Self {
            num: self
                .num
                .map_coeffs_rank(rank, |v| KVector::basis(&ring, rank, alpha, v.comp(0).clone())),
            den: self.den.clone(),
        }
    }

    fn raised_numerator(&self, den: &BTreeMap<CycloRational, u32>) -> LaurentQ {
        let mut n = self.num.clone();
        for (a, m) in den {
            let have = self.den.get(a).copied().unwrap_or(0);
            for _ in have..*m {
                n = n.mul_linear(a);
            }
        }
        n
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.rank() != other.rank() {
            return Err(Error::BasisMismatch("adding rational functions of different rank".into()));
        }
        let mut den = self.den.clone();
        for (a, m) in &other.den {
            let e = den.entry(a.clone()).or_default();
            *e = (*e).max(*m);
        }
        let mut num = self.raised_numerator(&den);
        num += &other.raised_numerator(&den);
        let mut out = Self { num, den };
        out.reduce();
        Ok(out)
    }

    pub fn eval_at(&self, q0: &CycloRational) -> Result<KVector> {
        let mut d = CycloRational::one();
        for (a, m) in &self.den {
            let f = q0 - a;
            if f.is_zero() {
                return Err(Error::PoleAtPoint(q0.to_string()));
            }
            d = &d * &f.pow(u64::from(*m));
        }
        Ok(self.num.eval_at(q0)?.scale_c(&d.inverse()?))
    }

    /// Laurent coefficients of the expansion at `q = 0` for exponents `<= upto`.
    pub fn expand_at_zero(&self, upto: i32) -> BTreeMap<i32, KVector> {
        let mut out = BTreeMap::new();
        let Some(lo) = self.num.min_exp() else {
            return out;
        };
        if upto < lo {
            return out;
        }
        let len = (upto - lo + 1) as usize;
        // 1/(q - a) = -sum_j a^{-(j+1)} q^j
        let mut p = vec![CycloRational::zero(); len];
        p[0] = CycloRational::one();
        for (a, m) in &self.den {
            let ainv = a.inverse().expect("roots are nonzero");
            let base: Coeffs = (0..len).map(|j| -ainv.pow(j as u64 + 1)).collect();
            p = convolve(&p, &power_series(&base, *m, len), len);
        }
        self.collect(&p, |k, j| k + j as i32, |e| e <= upto, &mut out);
        out
    }

    /// Coefficients of the expansion at `q = infinity` for exponents `>= downto`.
    pub fn expand_at_infinity(&self, downto: i32) -> BTreeMap<i32, KVector> {
        let mut out = BTreeMap::new();
        let Some(hi) = self.num.max_exp() else {
            return out;
        };
        let total: i32 = self.den.values().map(|m| *m as i32).sum();
        if hi - total < downto {
            return out;
        }
        let len = (hi - total - downto + 1) as usize;
        // 1/(q - a) = sum_j a^j q^{-(j+1)}
        let mut p = vec![CycloRational::zero(); len];
        p[0] = CycloRational::one();
        for (a, m) in &self.den {
            let base: Coeffs = (0..len).map(|j| a.pow(j as u64)).collect();
            p = convolve(&p, &power_series(&base, *m, len), len);
        }
        self.collect(&p, |k, j| k - total - j as i32, |e| e >= downto, &mut out);
        out
    }

    fn collect(
        &self,
        p: &[CycloRational],
        exponent: impl Fn(i32, usize) -> i32,
        keep: impl Fn(i32) -> bool,
        out: &mut BTreeMap<i32, KVector>,
    ) {
        for (k, v) in self.num.terms() {
            for (j, c) in p.iter().enumerate() {
                let e = exponent(k, j);
                if c.is_zero() || !keep(e) {
                    continue;
                }
                let entry = out
                    .entry(e)
                    .or_insert_with(|| KVector::zero(self.ring(), self.rank()));
                *entry += &v.scale_c(c);
            }
        }
        out.retain(|_, v| !v.is_zero());
    }

    /// Laurent coefficients in `s = q - a` (`a != 0`) for exponents `<= upto`.
    pub fn expand_at(&self, a: &CycloRational, upto: i32) -> Result<BTreeMap<i32, KVector>> {
        if a.is_zero() {
            return Ok(self.expand_at_zero(upto));
        }
        let m = self.den.get(a).copied().unwrap_or(0) as i32;
        let mut out = BTreeMap::new();
        if upto < -m {
            return Ok(out);
        }
        let len = (upto + m + 1) as usize;
        let ainv = a.inverse()?;
        let mut p = vec![CycloRational::zero(); len];
        p[0] = CycloRational::one();
        for (b, mb) in &self.den {
            if b == a {
                continue;
            }
            // 1/(a - b + s) = sum_j (-1)^j (a - b)^{-(j+1)} s^j
            let dinv = (a - b).inverse()?;
            let base: Coeffs = (0..len)
                .map(|j| {
                    let t = dinv.pow(j as u64 + 1);
                    if j % 2 == 1 {
                        -t
                    } else {
                        t
                    }
                })
                .collect();
            p = convolve(&p, &power_series(&base, *mb, len), len);
        }
        // (a + s)^k = a^k sum_j C(k, j) (s/a)^j
        let mut g: BTreeMap<usize, KVector> = BTreeMap::new();
        for (k, v) in self.num.terms() {
            let ak = a.powi(k as i64)?;
            for j in 0..len {
                let c = &(&ak * &ainv.pow(j as u64)) * &CycloRational::from_rational(binomial(k as i64, j as u32));
                if c.is_zero() {
                    continue;
                }
                let entry = g
                    .entry(j)
                    .or_insert_with(|| KVector::zero(self.ring(), self.rank()));
                *entry += &v.scale_c(&c);
            }
        }
        for (j, v) in &g {
            for (i, c) in p.iter().enumerate() {
                if j + i >= len || c.is_zero() {
                    continue;
                }
                let e = (j + i) as i32 - m;
                let entry = out
                    .entry(e)
                    .or_insert_with(|| KVector::zero(self.ring(), self.rank()));
                *entry += &v.scale_c(c);
            }
        }
        out.retain(|_, v: &mut KVector| !v.is_zero());
        Ok(out)
    }

    /// Poles of the form `f(x) dx/x`: always `0` and `infinity`, plus the roots.
    pub fn residue_points(&self) -> Vec<ResiduePoint> {
        let mut pts = vec![ResiduePoint::Zero, ResiduePoint::Infinity];
        pts.extend(self.den.keys().cloned().map(ResiduePoint::Root));
        pts
    }

    fn zero_vec(&self) -> KVector {
        KVector::zero(self.ring(), self.rank())
    }
}

/// The Laurent polynomial part `[f]_+`: `f` minus its principal parts at nonzero finite poles.
pub fn laurent_part(f: &RationalQ) -> LaurentQ {
    if f.is_laurent() {
        return f.num.clone();
    }
    let mut out = LaurentQ::zero(f.ring(), f.rank());
    for (k, v) in f.expand_at_infinity(0) {
        out.add_term(k, &v);
    }
    for (k, v) in f.expand_at_zero(-1) {
        out.add_term(k, &v);
    }
    out
}

/// Value and first derivative in the coordinate `q / root - 1`.
pub fn jet_at_root(f: &RationalQ, root: &CycloRational) -> Result<JetAtRoot> {
    check_root(root)?;
    if f.den.contains_key(root) {
        return Err(Error::PoleAtPoint(root.to_string()));
    }
    let coeffs = f.expand_at(root, 1)?;
    let get = |k: i32| coeffs.get(&k).cloned().unwrap_or_else(|| f.zero_vec());
    Ok(JetAtRoot {
        root: root.clone(),
        value: get(0),
        derivative: get(1).scale_c(root),
    })
}

/// Residue of `f(x) dx / x` at the given point.
pub fn residue_form(f: &RationalQ, at: &ResiduePoint) -> Result<KVector> {
    let zero = || f.zero_vec();
    Ok(match at {
        ResiduePoint::Zero => f.expand_at_zero(0).remove(&0).unwrap_or_else(zero),
        ResiduePoint::Infinity => {
            let c = f.expand_at_infinity(0).remove(&0).unwrap_or_else(zero);
            -&c
        }
        ResiduePoint::Root(a) => {
            check_root(a)?;
            f.shift(-1).expand_at(a, -1)?.remove(&-1).unwrap_or_else(zero)
        }
    })
}

/// Sum of the residues of `f(x) dx/x` over all of its poles, including `0` and `infinity`.
pub fn total_residue(f: &RationalQ) -> Result<KVector> {
    let mut acc = f.zero_vec();
    for p in f.residue_points() {
        acc += &residue_form(f, &p)?;
    }
    Ok(acc)
}

/// `g(q) = -tbar2(q + 2) / (q + 1)`, i.e. `g(q - 1) = -tbar2(q + 1) / q`.
pub fn t2_new_transform(tbar2: &LaurentQ) -> Result<RationalQ> {
    let shifted = tbar2.shift_argument(&CycloRational::from_int(2))?;
    RationalQ::with_pole(-&shifted, CycloRational::from_int(-1), 1)
}

/// Substitutes `q = x^{-r}`.
///
/// Each factor `(q - a)` becomes `x^{-r} (-a) prod_{b^r = 1/a} (x - b)`, so
/// every `b` has to be a 12th root of unity.
pub fn subst_inverse_power(f: &RationalQ, r: u32) -> Result<RationalQ> {
    assert!(r >= 1, "substitution power must be positive");
    let mut num = f.num.invert_power(r as i32);
    let mut den = BTreeMap::new();
    let mut scalar = CycloRational::one();
    let roots = CycloRational::roots_of_unity();
    for (a, m) in &f.den {
        let target = a.inverse()?;
        let preimages: Vec<&CycloRational> = roots.iter().filter(|b| b.pow(u64::from(r)) == target).collect();
        if preimages.len() != r as usize {
            return Err(Error::UnrepresentablePole(format!("{r}-th roots of {target}")));
        }
        for b in preimages {
            *den.entry(b.clone()).or_default() += m;
        }
        num = num.shift((r * m) as i32);
        scalar = &scalar * &(-a).pow(u64::from(*m));
    }
    num = num.scale_c(&scalar.inverse()?);
    RationalQ::new(num, den)
}

impl Add for &RationalQ {
    type Output = RationalQ;
    fn add(self, rhs: &RationalQ) -> RationalQ {
        self.checked_add(rhs).expect("rank mismatch")
    }
}

impl Sub for &RationalQ {
    type Output = RationalQ;
    fn sub(self, rhs: &RationalQ) -> RationalQ {
        self.checked_add(&-rhs).expect("rank mismatch")
    }
}

impl Neg for &RationalQ {
    type Output = RationalQ;
    fn neg(self) -> RationalQ {
        self.scale_c(&CycloRational::from_int(-1))
    }
}

impl fmt::Debug for RationalQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})", self.num)?;
        for (a, m) in &self.den {
            write!(f, " / (q - ({a}))^{m}")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct PoleRepr<'a> {
    root: &'a CycloRational,
    multiplicity: u32,
}

impl Serialize for RationalQ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            numerator: &'a LaurentQ,
            denominator: Vec<PoleRepr<'a>>,
        }
        Repr {
            numerator: &self.num,
            denominator: self
                .den
                .iter()
                .map(|(root, m)| PoleRepr { root, multiplicity: *m })
                .collect(),
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::SeriesRingConfig;

    fn ring() -> Ring {
        SeriesRingConfig::new(["e"], false, 2).unwrap()
    }

    fn c(n: i64) -> CycloRational {
        CycloRational::from_int(n)
    }

    fn poly(terms: &[(i32, i64)]) -> LaurentQ {
        LaurentQ::scalar_from_terms(&ring(), terms.iter().map(|(k, v)| (*k, c(*v))))
    }

    fn scalar(v: &KVector) -> CycloRational {
        v.comp(0).constant_term()
    }

    #[test]
    fn laurent_part_examples() {
        let r = ring();
        let f = RationalQ::with_pole(poly(&[(2, 1)]), c(1), 1).unwrap();
        assert_eq!(laurent_part(&f), poly(&[(1, 1), (0, 1)]));
        let g = RationalQ::new(poly(&[(0, 1)]), BTreeMap::from([(c(1), 1), (c(-1), 1)])).unwrap();
        assert!(laurent_part(&g).is_zero());
        let h = poly(&[(-2, 3), (1, 1)]);
        assert_eq!(laurent_part(&RationalQ::from_laurent(h.clone())), h);
        // q^{-1} / (q - 1) = -q^{-1} + 1/(q - 1)
        let k = RationalQ::with_pole(poly(&[(-1, 1)]), c(1), 1).unwrap();
        assert_eq!(laurent_part(&k), poly(&[(-1, -1)]));
        let _ = r;
    }

    #[test]
    fn reduction_cancels_common_factors() {
        // (q^2 - 1)/(q - 1) = q + 1
        let f = RationalQ::with_pole(poly(&[(2, 1), (0, -1)]), c(1), 1).unwrap();
        assert!(f.is_laurent());
        assert_eq!(f.numerator(), &poly(&[(1, 1), (0, 1)]));
    }

    #[test]
    fn jet_examples() {
        let f = RationalQ::from_laurent(poly(&[(0, 1), (1, -1)]));
        let j = jet_at_root(&f, &c(-1)).unwrap();
        assert_eq!((scalar(&j.value), scalar(&j.derivative)), (c(2), c(1)));
        let g = RationalQ::from_laurent(poly(&[(1, 1)]));
        let i = CycloRational::i();
        let j = jet_at_root(&g, &i).unwrap();
        assert_eq!((scalar(&j.value), scalar(&j.derivative)), (i.clone(), i));
        let p = RationalQ::with_pole(poly(&[(0, 1)]), c(1), 1).unwrap();
        assert!(jet_at_root(&p, &c(1)).is_err());
    }

    #[test]
    fn t2_new_examples() {
        assert!(t2_new_transform(&LaurentQ::zero(&ring(), 1)).unwrap().is_zero());
        let g = t2_new_transform(&poly(&[(1, 1), (0, -1)])).unwrap();
        assert_eq!(g, RationalQ::from_laurent(poly(&[(0, -1)])));
        let g = t2_new_transform(&poly(&[(2, 1), (1, -2), (0, 1)])).unwrap();
        assert_eq!(g, RationalQ::from_laurent(poly(&[(1, -1), (0, -1)])));
        assert!(t2_new_transform(&poly(&[(-1, 1)])).is_err());
    }

    #[test]
    fn substitution_examples() {
        let f = RationalQ::from_laurent(poly(&[(1, 1)]));
        assert_eq!(subst_inverse_power(&f, 1).unwrap(), RationalQ::from_laurent(poly(&[(-1, 1)])));
        let f = RationalQ::from_laurent(poly(&[(0, 1), (1, -1)]));
        assert_eq!(subst_inverse_power(&f, 2).unwrap(), RationalQ::from_laurent(poly(&[(0, 1), (-2, -1)])));
        // 1/(q - 1) at q = 1/x is x/(1 - x) = -x/(x - 1)
        let f = RationalQ::with_pole(poly(&[(0, 1)]), c(1), 1).unwrap();
        let expect = RationalQ::with_pole(poly(&[(1, -1)]), c(1), 1).unwrap();
        assert_eq!(subst_inverse_power(&f, 1).unwrap(), expect);
        // q = x^{-2}: 1/(q + 1) = x^2 / (x^2 + 1) needs the roots +-i
        let f = RationalQ::with_pole(poly(&[(0, 1)]), c(-1), 1).unwrap();
        let g = subst_inverse_power(&f, 2).unwrap();
        assert_eq!(g.denominator().len(), 2);
        assert_eq!(scalar(&g.eval_at(&c(2)).unwrap()), CycloRational::from_frac(4, 5));
    }

    #[test]
    fn residue_examples() {
        let one = RationalQ::from_laurent(poly(&[(0, 1)]));
        assert_eq!(scalar(&residue_form(&one, &ResiduePoint::Zero).unwrap()), c(1));
        assert_eq!(scalar(&residue_form(&one, &ResiduePoint::Infinity).unwrap()), c(-1));
        let x = RationalQ::from_laurent(poly(&[(1, 1)]));
        assert!(residue_form(&x, &ResiduePoint::Zero).unwrap().is_zero());
        let f = RationalQ::with_pole(poly(&[(1, 1)]), c(-1), 1).unwrap();
        assert_eq!(scalar(&residue_form(&f, &ResiduePoint::Root(c(-1))).unwrap()), c(1));
        assert!(residue_form(&f, &ResiduePoint::Zero).unwrap().is_zero());
        assert_eq!(scalar(&residue_form(&f, &ResiduePoint::Infinity).unwrap()), c(-1));
        assert!(total_residue(&f).unwrap().is_zero());
    }

    #[test]
    fn expansions_agree_with_evaluation() {
        // f = (q^3 + 2) / ((q - 1)^2 (q - i)); f = sum_k c_k s^k around a = -1
        let f = RationalQ::new(
            poly(&[(3, 1), (0, 2)]),
            BTreeMap::from([(c(1), 2), (CycloRational::i(), 1)]),
        )
        .unwrap();
        let at = f.expand_at(&c(-1), 0).unwrap();
        assert_eq!(at[&0], f.eval_at(&c(-1)).unwrap());
        let at0 = f.expand_at_zero(0);
        assert_eq!(at0[&0], f.eval_at(&c(0)).unwrap());
    }
}
