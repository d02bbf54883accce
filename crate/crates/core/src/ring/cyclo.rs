//! Exact arithmetic in the cyclotomic field `Q(zeta_12)`.
//!
//! Elements are stored in the power basis `{1, z, z^2, z^3}` where `z` is a
//! primitive 12th root of unity with minimal polynomial `z^4 - z^2 + 1`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of `Q(zeta_12)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycloRational {
    coeffs: [BigRational; 4],
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl CycloRational {
    pub fn new(coeffs: [BigRational; 4]) -> Self {
        Self { coeffs }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::new([r, BigRational::zero(), BigRational::zero(), BigRational::zero()])
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The primitive 12th root of unity `z` generating the field.
    pub fn zeta() -> Self {
        Self::new([rat(0), rat(1), rat(0), rat(0)])
    }

    /// `i = z^3`.
    pub fn i() -> Self {
        Self::new([rat(0), rat(0), rat(0), rat(1)])
    }

    /// Primitive cube root of unity `omega = z^4 = z^2 - 1`.
    pub fn omega() -> Self {
        Self::new([rat(-1), rat(0), rat(1), rat(0)])
    }

    /// `z^k` for any integer `k`.
    pub fn zeta_pow(k: i64) -> Self {
        let k = k.rem_euclid(12);
        let z = Self::zeta();
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * &z;
        }
        acc
    }

    /// All twelve 12th roots of unity, indexed by exponent of `z`.
    pub fn roots_of_unity() -> Vec<Self> {
        (0..12).map(Self::zeta_pow).collect()
    }

    pub fn coeffs(&self) -> &[BigRational; 4] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Returns the rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// If `self` is a 12th root of unity, its exponent `k` with `self = z^k`.
    pub fn root_exponent(&self) -> Option<u32> {
        let z = Self::zeta();
        let mut acc = Self::one();
        for k in 0..12 {
            if &acc == self {
                return Some(k);
            }
            acc = &acc * &z;
        }
        None
    }

    /// Multiplicative order if `self` is a root of unity in the field.
    pub fn root_order(&self) -> Option<u32> {
        self.root_exponent().map(|k| 12 / gcd(k, 12))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power, negative exponents invert.
    pub fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inverse()?.pow(e.unsigned_abs()))
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(self.coeffs.clone().map(|c| c * r))
    }

    /// Multiplicative inverse, by solving the 4x4 rational system `self * x = 1`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Column j of the multiplication matrix is self * z^j.
        let mut cols = Vec::with_capacity(4);
        let mut basis = Self::one();
        for _ in 0..4 {
            cols.push(self * &basis);
            basis = &basis * &Self::zeta();
        }
        let mut m: Vec<Vec<BigRational>> = (0..4)
            .map(|i| {
                let mut row: Vec<BigRational> = cols.iter().map(|c| c.coeffs[i].clone()).collect();
                row.push(if i == 0 { rat(1) } else { rat(0) });
                row
            })
            .collect();
        for col in 0..4 {
            let pivot = (col..4)
                .find(|&r| !m[r][col].is_zero())
                .ok_or(Error::DivisionByZero)?;
            m.swap(col, pivot);
            let inv = m[col][col].recip();
            for v in m[col].iter_mut() {
                *v = &*v * &inv;
            }
            for r in 0..4 {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in 0..5 {
                        let sub = &f * &m[col][c];
                        m[r][c] -= sub;
                    }
                }
            }
        }
        Ok(Self::new([
            m[0][4].clone(),
            m[1][4].clone(),
            m[2][4].clone(),
            m[3][4].clone(),
        ]))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    /// Parses `"p/q"`, `"p"`, or one of the named roots `i`, `-i`, `w`, `w^2`, `z^k`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "i" => return Ok(Self::i()),
            "-i" => return Ok(-Self::i()),
            "w" | "omega" => return Ok(Self::omega()),
            "w^2" | "omega^2" => return Ok(Self::omega().pow(2)),
            _ => {}
        }
        if let Some(k) = t.strip_prefix("z^") {
            let k: i64 = k
                .parse()
                .map_err(|_| Error::Parse(format!("bad root exponent in {t:?}")))?;
            return Ok(Self::zeta_pow(k));
        }
        parse_rational(t).map(Self::from_rational)
    }

    /// Parses the 4-tuple form used in JSON files.
    pub fn from_tuple(parts: &[String]) -> Result<Self> {
        if parts.len() != 4 {
            return Err(Error::Parse(format!(
                "cyclotomic value needs 4 coordinates, got {}",
                parts.len()
            )));
        }
        let mut out: [BigRational; 4] = Default::default();
        for (slot, p) in out.iter_mut().zip(parts) {
            *slot = parse_rational(p)?;
        }
        Ok(Self::new(out))
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Default for CycloRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for CycloRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for CycloRational {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

impl<'a> Add<&'a CycloRational> for &'a CycloRational {
    type Output = CycloRational;
    fn add(self, rhs: &CycloRational) -> CycloRational {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&CycloRational> for CycloRational {
    fn add_assign(&mut self, rhs: &CycloRational) {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl<'a> Sub<&'a CycloRational> for &'a CycloRational {
    type Output = CycloRational;
    fn sub(self, rhs: &CycloRational) -> CycloRational {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl SubAssign<&CycloRational> for CycloRational {
    fn sub_assign(&mut self, rhs: &CycloRational) {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Neg for CycloRational {
    type Output = CycloRational;
    fn neg(self) -> CycloRational {
        CycloRational::new(self.coeffs.map(|c| -c))
    }
}

impl Neg for &CycloRational {
    type Output = CycloRational;
    fn neg(self) -> CycloRational {
        -self.clone()
    }
}

impl<'a> Mul<&'a CycloRational> for &'a CycloRational {
    type Output = CycloRational;
    fn mul(self, rhs: &CycloRational) -> CycloRational {
        // Rational multiples skip the full convolution.
        if let Some(r) = rhs.as_rational() {
            return self.scale(r);
        }
        if let Some(r) = self.as_rational() {
            return rhs.scale(r);
        }
        let mut prod: [BigRational; 7] = Default::default();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        // z^6 = -1, z^5 = z^3 - z, z^4 = z^2 - 1.
        let [p0, p1, p2, p3, p4, p5, p6] = prod;
        CycloRational::new([p0 - &p4 - &p6, p1 - &p5, p2 + p4, p3 + p5])
    }
}

impl MulAssign<&CycloRational> for CycloRational {
    fn mul_assign(&mut self, rhs: &CycloRational) {
        *self = &*self * rhs;
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycloRational> for CycloRational {
            type Output = CycloRational;
            fn $m(self, rhs: CycloRational) -> CycloRational {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for CycloRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return f.write_str(&format_rational(r));
        }
        let names = ["", "z", "z^2", "z^3"];
        let mut first = true;
        for (c, name) in self.coeffs.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if name.is_empty() {
                f.write_str(&format_rational(&mag))?;
            } else if mag.is_one() {
                f.write_str(name)?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), name)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycloRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// JSON form: `"p/q"` for rationals, otherwise a 4-tuple of strings.
impl Serialize for CycloRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.as_rational() {
            Some(r) => s.serialize_str(&format_rational(r)),
            None => {
                let parts: Vec<String> = self.coeffs.iter().map(format_rational).collect();
                parts.serialize(s)
            }
        }
    }
}

impl<'de> Deserialize<'de> for CycloRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Tuple(Vec<String>),
        }
        let parsed = match Repr::deserialize(d)? {
            Repr::Str(s) => CycloRational::parse(&s),
            Repr::Tuple(t) => CycloRational::from_tuple(&t),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = CycloRational;

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(&C::i() * &C::i(), C::from_int(-1));
    }

    #[test]
    fn omega_is_a_primitive_cube_root() {
        let w = C::omega();
        assert_ne!(w, C::one());
        assert_eq!(w.pow(3), C::one());
        assert_eq!(w, C::zeta_pow(4));
    }

    #[test]
    fn zeta_times_zeta_cubed_reduces() {
        // z^4 = z^2 - 1
        let lhs = &C::zeta() * &C::zeta_pow(3);
        let expected = &C::zeta().pow(2) - &C::one();
        assert_eq!(lhs, expected);
    }

    #[test]
    fn minimal_polynomial_vanishes() {
        let z = C::zeta();
        let val = &(&z.pow(4) - &z.pow(2)) + &C::one();
        assert!(val.is_zero());
    }

    #[test]
    fn root_orders() {
        assert_eq!(C::one().root_order(), Some(1));
        assert_eq!(C::from_int(-1).root_order(), Some(2));
        assert_eq!(C::i().root_order(), Some(4));
        assert_eq!((-C::i()).root_order(), Some(4));
        assert_eq!(C::omega().root_order(), Some(3));
        assert_eq!(C::omega().pow(2).root_order(), Some(3));
        assert_eq!((-C::omega()).root_order(), Some(6));
        assert_eq!(C::from_int(2).root_order(), None);
    }

    #[test]
    fn inverse_of_generic_element() {
        let a = C::new([rat(2), rat(-1), rat(3), BigRational::new(1.into(), 2.into())]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, C::one());
        assert!(C::zero().inverse().is_err());
    }

    #[test]
    fn json_round_trip() {
        for v in [C::from_frac(-3, 7), C::i(), &C::omega() * &C::from_frac(1, 3)] {
            let s = serde_json::to_string(&v).unwrap();
            let back: C = serde_json::from_str(&s).unwrap();
            assert_eq!(back, v);
        }
        assert_eq!(serde_json::to_string(&C::from_frac(1, 2)).unwrap(), "\"1/2\"");
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(C::omega().to_string(), "-1 + z^2");
        assert_eq!(C::from_frac(-5, 3).to_string(), "-5/3");
    }
}
