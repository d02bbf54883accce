use std::fmt;

use num::{BigInt, BigRational, One};
use serde::{Deserialize, Serialize};

/// Counts `(l_1, l_2, ...)` of cycles of each length; trailing zeros are trimmed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<u32>", into = "Vec<u32>")]
pub struct CycleType(Vec<u32>);

impl From<Vec<u32>> for CycleType {
    fn from(mut v: Vec<u32>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        CycleType(v)
    }
}

impl From<CycleType> for Vec<u32> {
    fn from(c: CycleType) -> Self {
        c.0
    }
}

impl CycleType {
    pub fn new(counts: Vec<u32>) -> Self {
        counts.into()
    }

    /// One cycle of length `r`.
    pub fn single(r: u32) -> Self {
        let mut v = vec![0; r as usize];
        v[r as usize - 1] = 1;
        v.into()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    /// `l_r`, zero past the stored length.
    pub fn count(&self, r: u32) -> u32 {
        self.0.get(r as usize - 1).copied().unwrap_or(0)
    }

    pub fn max_length(&self) -> u32 {
        self.0.len() as u32
    }

    /// Number of cycles `sum_r l_r`.
    pub fn cycles(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of marked points `|l| = sum_r r l_r`.
    pub fn size(&self) -> u32 {
        self.0.iter().enumerate().map(|(i, c)| (i as u32 + 1) * c).sum()
    }

    /// `l! = prod_r l_r!`.
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|c| factorial(*c)).product()
    }

    /// `prod_r r^{-l_r}`.
    pub fn cycle_weight(&self) -> BigRational {
        let den: BigInt = self
            .0
            .iter()
            .enumerate()
            .map(|(i, c)| BigInt::from(i as u64 + 1).pow(*c))
            .product();
        BigRational::new(BigInt::one(), den)
    }

    pub fn add(&self, other: &CycleType) -> CycleType {
        let n = self.0.len().max(other.0.len());
        (0..n)
            .map(|i| self.0.get(i).unwrap_or(&0) + other.0.get(i).unwrap_or(&0))
            .collect::<Vec<_>>()
            .into()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(i, c)| format!("{c}_{}", i + 1))
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join("+"))
        }
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// One cycle's insertion: `phi_basis * L^exponent` on an `r`-cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub r: u32,
    pub exponent: i32,
    pub basis: usize,
}

impl Slot {
    pub fn new(r: u32, exponent: i32, basis: usize) -> Self {
        Self { r, exponent, basis }
    }
}

/// Canonical key of a base correlator: slots sorted, cycle type derived from the slots.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CorrelatorKey {
    pub genus: u32,
    pub degree: u32,
    slots: Vec<Slot>,
}

impl CorrelatorKey {
    pub fn new(genus: u32, degree: u32, mut slots: Vec<Slot>) -> Self {
        slots.sort();
        Self { genus, degree, slots }
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn cycle_type(&self) -> CycleType {
        let max = self.slots.iter().map(|s| s.r).max().unwrap_or(0) as usize;
        let mut v = vec![0; max];
        for s in &self.slots {
            v[s.r as usize - 1] += 1;
        }
        v.into()
    }

    /// Unstable: genus 0 with at most two marked points, genus 1 with none.
    pub fn is_unstable(&self) -> bool {
        let n = self.cycle_type().size();
        (self.genus == 0 && n <= 2) || (self.genus == 1 && n == 0)
    }

    pub fn is_level_one(&self) -> bool {
        self.slots.iter().all(|s| s.r == 1)
    }

    pub fn with_slot(&self, s: Slot) -> Self {
        let mut slots = self.slots.clone();
        slots.push(s);
        Self::new(self.genus, self.degree, slots)
    }

    pub fn without(&self, i: usize) -> Self {
        let mut slots = self.slots.clone();
        slots.remove(i);
        Self::new(self.genus, self.degree, slots)
    }

    pub fn replace(&self, i: usize, s: Slot) -> Self {
        let mut slots = self.slots.clone();
        slots[i] = s;
        Self::new(self.genus, self.degree, slots)
    }
}

impl fmt::Display for CorrelatorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "r{}:L^{}*phi{}", s.r, s.exponent, s.basis)?;
        }
        write!(f, ">_(g={}, l={}, d={})", self.genus, self.cycle_type(), self.degree)
    }
}
