//! Truncated multivariate power series over `Q(zeta_12)`.
//!
//! A [`Series`] lives in a ring fixed by a [`SeriesRingConfig`]: a list of
//! formal parameters of filtration degree one, an optional Novikov variable
//! (also degree one) and a truncation order `N`.  Every stored monomial has
//! total degree at most `N`; zero coefficients are never stored, so equality
//! of canonical forms is structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::cyclo::CycloRational;
use crate::error::{Error, Result};

pub const NOVIKOV_NAME: &str = "Q";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeriesRingConfig {
    variables: Vec<String>,
    novikov: bool,
    order: u32,
}

pub type Ring = Arc<SeriesRingConfig>;

impl SeriesRingConfig {
    pub fn new<S: Into<String>>(
        variables: impl IntoIterator<Item = S>,
        novikov: bool,
        order: u32,
    ) -> Result<Ring> {
        let variables: Vec<String> = variables.into_iter().map(Into::into).collect();
        if order < 1 {
            return Err(Error::InvalidConfig("truncation order must be >= 1".into()));
        }
        for (i, v) in variables.iter().enumerate() {
            if v.is_empty() || v == NOVIKOV_NAME {
                return Err(Error::InvalidConfig(format!("reserved or empty variable name {v:?}")));
            }
            if variables[..i].contains(v) {
                return Err(Error::InvalidConfig(format!("duplicate variable {v:?}")));
            }
        }
        Ok(Arc::new(Self {
            variables,
            novikov,
            order,
        }))
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn novikov_enabled(&self) -> bool {
        self.novikov
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Length of exponent vectors: parameters followed by the Novikov slot.
    pub fn arity(&self) -> usize {
        self.variables.len() + usize::from(self.novikov)
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        if self.novikov && name == NOVIKOV_NAME {
            return Some(self.variables.len());
        }
        self.variables.iter().position(|v| v == name)
    }

    fn novikov_index(&self) -> Option<usize> {
        self.novikov.then_some(self.variables.len())
    }

    /// Same ring with a different truncation order.
    pub fn with_order(&self, order: u32) -> Result<Ring> {
        Self::new(self.variables.clone(), self.novikov, order)
    }

    /// Same ring with one extra formal parameter appended.
    pub fn with_extra_variable(&self, name: &str) -> Result<Ring> {
        let mut vars = self.variables.clone();
        vars.push(name.to_string());
        Self::new(vars, self.novikov, self.order)
    }
}

pub type Monomial = Vec<u32>;

fn degree(m: &[u32]) -> u32 {
    m.iter().sum()
}

#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    ring: Ring,
    terms: BTreeMap<Monomial, CycloRational>,
}

fn same_ring(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Series {
    pub fn zero(ring: &Ring) -> Self {
        Self {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, c: CycloRational) -> Self {
        Self::monomial(ring, vec![0; ring.arity()], c)
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, CycloRational::one())
    }

    pub fn from_int(ring: &Ring, n: i64) -> Self {
        Self::constant(ring, CycloRational::from_int(n))
    }

    /// `c * x^m`; dropped if the degree exceeds the truncation order.
    pub fn monomial(ring: &Ring, m: Monomial, c: CycloRational) -> Self {
        assert_eq!(m.len(), ring.arity(), "monomial arity mismatch");
        let mut s = Self::zero(ring);
        if !c.is_zero() && degree(&m) <= ring.order() {
            s.terms.insert(m, c);
        }
        s
    }

    /// The formal parameter (or `Q`) with the given name.
    pub fn var(ring: &Ring, name: &str) -> Result<Self> {
        let idx = ring
            .variable_index(name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown variable {name:?}")))?;
        let mut m = vec![0; ring.arity()];
        m[idx] = 1;
        Ok(Self::monomial(ring, m, CycloRational::one()))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CycloRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &[u32]) -> CycloRational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> CycloRational {
        self.coefficient(&vec![0; self.ring.arity()])
    }

    /// Smallest total degree present; `None` stands for infinity (zero series).
    pub fn filtration_order(&self) -> Option<u32> {
        self.terms.keys().map(|m| degree(m)).min()
    }

    /// Drops every term of degree greater than `order` (comparison mod `Lambda_+^{order+1}`).
    pub fn truncated(&self, order: u32) -> Self {
        Self {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| degree(m) <= order)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-embeds into a ring with the same variables (possibly another order).
    pub fn reinterpret(&self, ring: &Ring) -> Result<Self> {
        if ring.variables() != self.ring.variables()
            || ring.novikov_enabled() != self.ring.novikov_enabled()
        {
            return Err(Error::ConfigMismatch);
        }
        let mut out = Self::zero(ring);
        for (m, c) in &self.terms {
            if degree(m) <= ring.order() {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Embeds into a ring whose variable list extends this one.
    pub fn embed(&self, ring: &Ring) -> Result<Self> {
        let mut map = Vec::with_capacity(self.ring.arity());
        for v in self.ring.variables() {
            map.push(ring.variable_index(v).ok_or(Error::ConfigMismatch)?);
        }
        if let Some(_) = self.ring.novikov_index() {
            map.push(ring.novikov_index().ok_or(Error::ConfigMismatch)?);
        }
        let mut out = Self::zero(ring);
        for (m, c) in &self.terms {
            let mut nm = vec![0; ring.arity()];
            for (i, e) in m.iter().enumerate() {
                nm[map[i]] = *e;
            }
            if degree(&nm) <= ring.order() {
                out.terms.insert(nm, c.clone());
            }
        }
        Ok(out)
    }

    /// Maps into a ring over a subset of the variables, setting the others to zero.
    pub fn restrict(&self, ring: &Ring) -> Result<Self> {
        let mut map = Vec::with_capacity(ring.arity());
        for v in ring.variables() {
            map.push(self.ring.variable_index(v).ok_or(Error::ConfigMismatch)?);
        }
        if ring.novikov_index().is_some() {
            map.push(self.ring.novikov_index().ok_or(Error::ConfigMismatch)?);
        }
        let mut out = Self::zero(ring);
        for (m, c) in &self.terms {
            let nm: Monomial = map.iter().map(|i| m[*i]).collect();
            if degree(&nm) == degree(m) && degree(&nm) <= ring.order() {
                out.terms.insert(nm, c.clone());
            }
        }
        Ok(out)
    }

    /// Coefficient of `var^power`, as a series in the remaining variables
    /// (the exponent of `var` is set to zero in the result).
    pub fn coefficient_of(&self, var: &str, power: u32) -> Result<Self> {
        let idx = self
            .ring
            .variable_index(var)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown variable {var:?}")))?;
        let mut out = Self::zero(&self.ring);
        for (m, c) in &self.terms {
            if m[idx] == power {
                let mut nm = m.clone();
                nm[idx] = 0;
                out.terms.insert(nm, c.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &CycloRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        Self {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&CycloRational::from_int(n))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::ConfigMismatch);
        }
        let mut out = self.clone();
        out.add_terms(other, false);
        Ok(out)
    }

    fn add_terms(&mut self, other: &Self, negate: bool) {
        for (m, c) in &other.terms {
            let entry = self.terms.entry(m.clone()).or_default();
            if negate {
                *entry -= c;
            } else {
                *entry += c;
            }
            if entry.is_zero() {
                self.terms.remove(m);
            }
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::ConfigMismatch);
        }
        let n = self.ring.order();
        let mut acc: BTreeMap<Monomial, CycloRational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            let da = degree(ma);
            for (mb, cb) in &other.terms {
                if da + degree(mb) > n {
                    continue;
                }
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                *acc.entry(m).or_default() += &(ca * cb);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Self {
            ring: self.ring.clone(),
            terms: acc,
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ring);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a unit: `c^{-1} * sum_k (-u/c)^k` where `self = c + u`, `u` in `Lambda_+`.
    pub fn invert(&self) -> Result<Self> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::NonUnit);
        }
        let c_inv = c.inverse()?;
        let mut u = self.clone();
        u.terms.remove(&vec![0; self.ring.arity()]);
        let x = u.scale(&(-&c_inv));
        let mut acc = Self::one(&self.ring);
        let mut power = Self::one(&self.ring);
        for _ in 0..self.ring.order() {
            power = &power * &x;
            if power.is_zero() {
                break;
            }
            acc += &power;
        }
        Ok(acc.scale(&c_inv))
    }

    /// `log(self) = -sum_{k>=1} (1 - self)^k / k`, for constant term 1.
    pub fn log_unit(&self) -> Result<Self> {
        let c = self.constant_term();
        if !c.is_one() {
            return Err(Error::LogNonUnit(c.to_string()));
        }
        let x = &Self::one(&self.ring) - self;
        let mut acc = Self::zero(&self.ring);
        let mut power = Self::one(&self.ring);
        for k in 1..=self.ring.order() as i64 {
            power = &power * &x;
            if power.is_zero() {
                break;
            }
            acc -= &power.scale(&CycloRational::from_frac(1, k));
        }
        Ok(acc)
    }

    /// `exp(self)` for `self` in `Lambda_+`.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::Unsupported("exp of a series with nonzero constant term".into()));
        }
        let mut acc = Self::one(&self.ring);
        let mut term = Self::one(&self.ring);
        for k in 1..=self.ring.order() as i64 {
            term = (&term * self).scale(&CycloRational::from_frac(1, k));
            if term.is_zero() {
                break;
            }
            acc += &term;
        }
        Ok(acc)
    }

    /// Adams action on Novikov degrees: `Q^d -> Q^{r d}`; formal parameters untouched.
    pub fn adams_novikov(&self, r: u32) -> Self {
        assert!(r >= 1, "Adams operation index must be positive");
        let Some(qi) = self.ring.novikov_index() else {
            return self.clone();
        };
        let mut out = Self::zero(&self.ring);
        for (m, c) in &self.terms {
            let mut nm = m.clone();
            nm[qi] *= r;
            if degree(&nm) <= self.ring.order() {
                *out.terms.entry(nm).or_default() += c;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        self.checked_add(rhs).expect("series from different rings")
    }
}

impl AddAssign<&Series> for Series {
    fn add_assign(&mut self, rhs: &Series) {
        assert!(same_ring(&self.ring, &rhs.ring), "series from different rings");
        self.add_terms(rhs, false);
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl SubAssign<&Series> for Series {
    fn sub_assign(&mut self, rhs: &Series) {
        assert!(same_ring(&self.ring, &rhs.ring), "series from different rings");
        self.add_terms(rhs, true);
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        self.checked_mul(rhs).expect("series from different rings")
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale_int(-1)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let names: Vec<&str> = self
            .ring
            .variables()
            .iter()
            .map(String::as_str)
            .chain(self.ring.novikov.then_some(NOVIKOV_NAME))
            .collect();
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mono: Vec<String> = m
                .iter()
                .zip(&names)
                .filter(|(e, _)| **e > 0)
                .map(|(e, n)| if *e == 1 { n.to_string() } else { format!("{n}^{e}") })
                .collect();
            if mono.is_empty() {
                write!(f, "({c})")?;
            } else if c.is_one() {
                f.write_str(&mono.join("*"))?;
            } else {
                write!(f, "({c})*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize)]
struct TermRepr<'a> {
    powers: BTreeMap<&'a str, u32>,
    coeff: &'a CycloRational,
}

/// Serialized as a list of `{"powers": {...}, "coeff": ...}` in canonical order.
impl Serialize for Series {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let names: Vec<&str> = self
            .ring
            .variables()
            .iter()
            .map(String::as_str)
            .chain(self.ring.novikov.then_some(NOVIKOV_NAME))
            .collect();
        let terms: Vec<TermRepr<'_>> = self
            .terms
            .iter()
            .map(|(m, c)| TermRepr {
                powers: m
                    .iter()
                    .zip(&names)
                    .filter(|(e, _)| **e > 0)
                    .map(|(e, n)| (*n, *e))
                    .collect(),
                coeff: c,
            })
            .collect();
        terms.serialize(s)
    }
}
