use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use serde::{Serialize, Serializer};

use super::kvector::KVector;
use crate::error::{Error, Result};
use crate::ring::{CycloRational, Ring, Series};

/// A Laurent polynomial in `q` with coefficients in `K`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentQ {
    ring: Ring,
    rank: usize,
    terms: BTreeMap<i32, KVector>,
}

impl LaurentQ {
    pub fn zero(ring: &Ring, rank: usize) -> Self {
        Self {
            ring: ring.clone(),
            rank,
            terms: BTreeMap::new(),
        }
    }

    /// `v * q^k`.
    pub fn monomial(k: i32, v: KVector) -> Self {
        let mut out = Self::zero(v.ring(), v.rank());
        out.add_term(k, &v);
        out
    }

    pub fn constant(v: KVector) -> Self {
        Self::monomial(0, v)
    }

    /// Scalar (rank-one) Laurent polynomial from `(exponent, coefficient)` pairs.
    pub fn scalar_from_terms(ring: &Ring, terms: impl IntoIterator<Item = (i32, CycloRational)>) -> Self {
        let mut out = Self::zero(ring, 1);
        for (k, c) in terms {
            out.add_term(k, &KVector::scalar(Series::constant(ring, c)));
        }
        out
    }

    /// `c * (1 - q)` in the unit direction; the dilaton shift `v`.
    pub fn dilaton_shift(ring: &Ring, rank: usize) -> Self {
        let one = KVector::unit(ring, rank, Series::one(ring));
        let mut out = Self::constant(one.clone());
        out.add_term(1, &(-&one));
        out
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &KVector)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, k: i32) -> KVector {
        self.terms
            .get(&k)
            .cloned()
            .unwrap_or_else(|| KVector::zero(&self.ring, self.rank))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn add_term(&mut self, k: i32, v: &KVector) {
        assert_eq!(v.rank(), self.rank, "rank mismatch");
        let entry = self
            .terms
            .entry(k)
            .or_insert_with(|| KVector::zero(&self.ring, self.rank));
        *entry += v;
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn filtration_order(&self) -> Option<u32> {
        self.terms.values().filter_map(KVector::filtration_order).min()
    }

    pub fn map_coeffs(&self, f: impl Fn(&KVector) -> KVector) -> Self {
        let mut out = Self::zero(&self.ring, self.rank);
        for (k, v) in &self.terms {
            out.add_term(*k, &f(v));
        }
        out
    }

    /// Like `map_coeffs` but the image lives in a space of rank `rank`.
    pub fn map_coeffs_rank(&self, rank: usize, f: impl Fn(&KVector) -> KVector) -> Self {
        let mut out = Self::zero(&self.ring, rank);
        for (k, v) in &self.terms {
            out.add_term(*k, &f(v));
        }
        out
    }

    /// Moves every coefficient into `ring` through `f`.
    pub fn try_map_ring(&self, ring: &Ring, f: impl Fn(&Series) -> Result<Series>) -> Result<Self> {
        let mut out = Self::zero(ring, self.rank);
        for (k, v) in &self.terms {
            out.add_term(*k, &v.try_map(&f)?);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Series) -> Self {
        self.map_coeffs(|v| v.scale(s))
    }

    pub fn scale_c(&self, c: &CycloRational) -> Self {
        self.map_coeffs(|v| v.scale_c(c))
    }

    pub fn truncated(&self, order: u32) -> Self {
        self.map_coeffs(|v| v.truncated(order))
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            ring: self.ring.clone(),
            rank: self.rank,
            terms: self.terms.iter().map(|(e, v)| (e + k, v.clone())).collect(),
        }
    }

    /// Multiplies by `(q - a)`.
    pub fn mul_linear(&self, a: &CycloRational) -> Self {
        let mut out = self.shift(1);
        out -= &self.scale_c(a);
        out
    }

    /// Product with a scalar (rank-one) Laurent polynomial.
    pub fn mul_scalar(&self, s: &LaurentQ) -> Self {
        assert_eq!(s.rank, 1, "scalar factor must have rank one");
        let mut out = Self::zero(&self.ring, self.rank);
        for (ka, va) in &self.terms {
            for (kb, vb) in &s.terms {
                out.add_term(ka + kb, &va.scale(vb.comp(0)));
            }
        }
        out
    }

    /// Component `alpha` as a rank-one Laurent polynomial.
    pub fn component(&self, alpha: usize) -> LaurentQ {
        let mut out = Self::zero(&self.ring, 1);
        for (k, v) in &self.terms {
            out.add_term(*k, &KVector::scalar(v.comp(alpha).clone()));
        }
        out
    }

    /// Substitutes `q = q0`.
    pub fn eval_at(&self, q0: &CycloRational) -> Result<KVector> {
        if q0.is_zero() {
            if self.min_exp().is_some_and(|k| k < 0) {
                return Err(Error::EvalAtZero);
            }
            return Ok(self.coeff(0));
        }
        let mut acc = KVector::zero(&self.ring, self.rank);
        for (k, v) in &self.terms {
            acc += &v.scale_c(&q0.powi(*k as i64)?);
        }
        Ok(acc)
    }

    /// Exact quotient by `(q - a)`, if the remainder vanishes.
    pub fn div_linear(&self, a: &CycloRational) -> Option<Self> {
        let (Some(lo), Some(hi)) = (self.min_exp(), self.max_exp()) else {
            return Some(self.clone());
        };
        // Synthetic division of q^{-lo} * self, a polynomial of degree hi - lo.
        let mut out = Self::zero(&self.ring, self.rank);
        let mut carry = KVector::zero(&self.ring, self.rank);
        for e in (lo..=hi).rev() {
            let cur = &self.coeff(e) + &carry;
            if e == lo {
                return cur.is_zero().then_some(out);
            }
            out.add_term(e - 1, &cur);
            carry = cur.scale_c(a);
        }
        unreachable!()
    }

    /// The substitution `q -> q^{-r}` applied to exponents.
    pub fn invert_power(&self, r: i32) -> Self {
        Self {
            ring: self.ring.clone(),
            rank: self.rank,
            terms: self.terms.iter().map(|(e, v)| (-e * r, v.clone())).collect(),
        }
    }

    /// The substitution `q -> q + c` for a polynomial (no negative exponents).
    pub fn shift_argument(&self, c: &CycloRational) -> Result<Self> {
        if self.min_exp().is_some_and(|k| k < 0) {
            let pole = -c;
            return Err(Error::UnrepresentablePole(pole.to_string()));
        }
        let mut out = Self::zero(&self.ring, self.rank);
        for (k, v) in &self.terms {
            let k = *k as u32;
            let mut binom = num::BigInt::from(1);
            for j in 0..=k {
                let coeff = &CycloRational::from_rational(num::BigRational::from_integer(binom.clone()))
                    * &c.pow(u64::from(k - j));
                out.add_term(j as i32, &v.scale_c(&coeff));
                binom = binom * num::BigInt::from(k - j) / num::BigInt::from(j + 1);
            }
        }
        Ok(out)
    }
}

/// `D t(q) = (t(q) - t(1)) / (q - 1)`, always an exact quotient.
pub fn d_operator(t: &LaurentQ) -> LaurentQ {
    let t1 = t.eval_at(&CycloRational::one()).expect("q = 1 is never a problem");
    let mut num = t.clone();
    num -= &LaurentQ::constant(t1);
    num.div_linear(&CycloRational::one())
        .expect("t(q) - t(1) vanishes at q = 1")
}

impl AddAssign<&LaurentQ> for LaurentQ {
    fn add_assign(&mut self, rhs: &LaurentQ) {
        for (k, v) in &rhs.terms {
            self.add_term(*k, v);
        }
    }
}

impl SubAssign<&LaurentQ> for LaurentQ {
    fn sub_assign(&mut self, rhs: &LaurentQ) {
        for (k, v) in &rhs.terms {
            self.add_term(*k, &(-v));
        }
    }
}

impl Add for &LaurentQ {
    type Output = LaurentQ;
    fn add(self, rhs: &LaurentQ) -> LaurentQ {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &LaurentQ {
    type Output = LaurentQ;
    fn sub(self, rhs: &LaurentQ) -> LaurentQ {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &LaurentQ {
    type Output = LaurentQ;
    fn neg(self) -> LaurentQ {
        self.scale_c(&CycloRational::from_int(-1))
    }
}

impl fmt::Debug for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| format!("[{v:?}]q^{k}"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Serialize)]
struct LaurentTerm<'a> {
    exponent: i32,
    coeff: &'a KVector,
}

impl Serialize for LaurentQ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<LaurentTerm<'_>> = self
            .terms
            .iter()
            .map(|(k, c)| LaurentTerm { exponent: *k, coeff: c })
            .collect();
        v.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::SeriesRingConfig;

    fn ring() -> Ring {
        SeriesRingConfig::new(["e"], false, 2).unwrap()
    }

    fn scalar(terms: &[(i32, i64)]) -> LaurentQ {
        LaurentQ::scalar_from_terms(&ring(), terms.iter().map(|(k, c)| (*k, CycloRational::from_int(*c))))
    }

    #[test]
    fn d_operator_examples() {
        assert_eq!(d_operator(&scalar(&[(1, 1)])), scalar(&[(0, 1)]));
        assert_eq!(d_operator(&scalar(&[(2, 1)])), scalar(&[(1, 1), (0, 1)]));
        // (q^{-1} - 1)/(q - 1) = -q^{-1}
        let d = d_operator(&scalar(&[(-1, 1)]));
        assert_eq!(d, scalar(&[(-1, -1)]));
        let back = &d.mul_linear(&CycloRational::one()) + &scalar(&[(0, 1)]);
        assert_eq!(back, scalar(&[(-1, 1)]));
    }

    #[test]
    fn evaluation_examples() {
        let v = scalar(&[(0, 1), (1, -1)]);
        assert!(v.eval_at(&CycloRational::one()).unwrap().is_zero());
        assert_eq!(
            v.eval_at(&CycloRational::from_int(-1)).unwrap(),
            KVector::scalar(Series::from_int(&ring(), 2))
        );
        assert_eq!(
            scalar(&[(2, 1)]).eval_at(&CycloRational::i()).unwrap(),
            KVector::scalar(Series::from_int(&ring(), -1))
        );
        assert!(matches!(scalar(&[(-1, 1)]).eval_at(&CycloRational::zero()), Err(Error::EvalAtZero)));
    }

    #[test]
    fn shift_argument_binomial() {
        // (q)^2 at q -> q + 2 is q^2 + 4q + 4
        let p = scalar(&[(2, 1)]).shift_argument(&CycloRational::from_int(2)).unwrap();
        assert_eq!(p, scalar(&[(2, 1), (1, 4), (0, 4)]));
    }
}
