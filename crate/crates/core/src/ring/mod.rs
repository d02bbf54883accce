//! Exact coefficient arithmetic.

pub mod cyclo;
pub mod series;

pub use cyclo::CycloRational;
pub use series::{Monomial, Ring, Series, SeriesRingConfig, NOVIKOV_NAME};

use num::{BigInt, BigRational, One};

/// Generalized binomial coefficient `C(k, j)` for any integer `k`.
pub fn binomial(k: i64, j: u32) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..i64::from(j) {
        acc *= BigRational::new(BigInt::from(k - i), BigInt::from(i + 1));
    }
    acc
}
