//! Genus-0 correlators of the point target, defined by the string recursion.
//!
//! Inputs are rewritten in the basis `u^j = (L - 1)^j`. There `D u^j = u^{j-1}`
//! and `u^0(1) = 1`, `u^j(1) = 0` for `j > 0`, so the string equation becomes
//!
//! ```text
//! I(0, j_2, ..., j_n) = I(j_2, ..., j_n) + sum_i I(..., j_i - 1, ...)
//! ```
//!
//! with `I(0, 0, 0) = 1` and `I(j) = 0` whenever no slot has `j = 0`
//! (every insertion vanishes at `L = 1` and the 3-point base is all we have).

use std::collections::HashMap;
use std::sync::RwLock;

use num::{BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::qfun::LaurentQ;
use crate::ring::{binomial, CycloRational, Series};

#[derive(Debug)]
pub struct PointBackend {
    cache: Option<RwLock<HashMap<Vec<u32>, BigRational>>>,
}

impl Default for PointBackend {
    fn default() -> Self {
        Self::new(true)
    }
}

impl PointBackend {
    pub fn new(memoize: bool) -> Self {
        Self {
            cache: memoize.then(|| RwLock::new(HashMap::new())),
        }
    }

    pub fn cache_len(&self) -> usize {
        self.cache.as_ref().map_or(0, |c| c.read().expect("cache poisoned").len())
    }

    /// `<u^{j_1}, ..., u^{j_n}>_{0,n}`.
    pub fn u_value(&self, js: &[u32]) -> BigRational {
        let mut key = js.to_vec();
        key.sort_unstable();
        self.u_value_sorted(key)
    }

    fn u_value_sorted(&self, key: Vec<u32>) -> BigRational {
        let n = key.len();
        assert!(n >= 3, "unstable point correlator");
        if n == 3 {
            return if key.iter().all(|j| *j == 0) {
                BigRational::one()
            } else {
                BigRational::zero()
            };
        }
        // total u-degree beyond dim M_{0,n} = n - 3 is impossible to reach a
        // nonzero base, and short-circuiting keeps the memo small
        if key.iter().map(|j| *j as usize).sum::<usize>() > n - 3 || key[0] != 0 {
            return BigRational::zero();
        }
        if let Some(cache) = &self.cache {
            if let Some(v) = cache.read().expect("cache poisoned").get(&key) {
                return v.clone();
            }
        }
        let rest: Vec<u32> = key[1..].to_vec();
        let mut acc = self.u_value_sorted(rest.clone());
        for i in 0..rest.len() {
            if rest[i] > 0 {
                let mut lowered = rest.clone();
                lowered[i] -= 1;
                lowered.sort_unstable();
                acc += self.u_value_sorted(lowered);
            }
        }
        if let Some(cache) = &self.cache {
            cache.write().expect("cache poisoned").insert(key, acc.clone());
        }
        acc
    }

    /// `<L^{k_1}, ..., L^{k_n}>_{0,n}`.
    pub fn exponent_value(&self, ks: &[i32]) -> BigRational {
        let n = ks.len();
        assert!(n >= 3, "unstable point correlator");
        let budget = (n - 3) as u32;
        let rows: Vec<Vec<BigRational>> = ks
            .iter()
            .map(|k| (0..=budget).map(|j| binomial(i64::from(*k), j)).collect())
            .collect();
        let mut acc = BigRational::zero();
        let mut js = vec![0u32; n];
        self.sum_tuples(&rows, 0, budget, &mut js, BigRational::one(), &mut |w, v| acc += w * v);
        acc
    }

    fn sum_tuples<T: Clone + Mulable>(
        &self,
        rows: &[Vec<T>],
        i: usize,
        budget: u32,
        js: &mut Vec<u32>,
        weight: T,
        emit: &mut impl FnMut(T, BigRational),
    ) {
        if i == rows.len() {
            let v = self.u_value(js);
            if !v.is_zero() {
                emit(weight, v);
            }
            return;
        }
        for j in 0..=budget {
            let c = &rows[i][j as usize];
            if c.is_zero_value() {
                continue;
            }
            js[i] = j;
            self.sum_tuples(rows, i + 1, budget - j, js, weight.times(c), emit);
        }
        js[i] = 0;
    }

    /// `<t_1(L), ..., t_n(L)>_{0,n}` for rank-one Laurent inputs.
    pub fn chi_point_g0(&self, inputs: &[LaurentQ]) -> Result<Series> {
        let n = inputs.len();
        if n < 3 {
            return Err(Error::Unstable { genus: 0, points: n });
        }
        let ring = inputs[0].ring().clone();
        if inputs.iter().any(|t| t.rank() != 1) {
            return Err(Error::BasisMismatch("point correlators take rank-one inputs".into()));
        }
        let budget = (n - 3) as u32;
        let rows: Vec<Vec<Series>> = inputs
            .iter()
            .map(|t| {
                (0..=budget)
                    .map(|j| {
                        let mut s = Series::zero(&ring);
                        for (k, v) in t.terms() {
                            let b = binomial(i64::from(k), j);
                            s += &v.comp(0).scale(&CycloRational::from_rational(b));
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        let mut acc = Series::zero(&ring);
        let mut js = vec![0u32; n];
        self.sum_tuples(&rows, 0, budget, &mut js, Series::one(&ring), &mut |w, v| {
            acc += &w.scale(&CycloRational::from_rational(v));
        });
        Ok(acc)
    }
}

trait Mulable {
    fn times(&self, other: &Self) -> Self;
    fn is_zero_value(&self) -> bool;
}

impl Mulable for BigRational {
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

impl Mulable for Series {
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}
