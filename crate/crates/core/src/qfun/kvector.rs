use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::{CycloRational, Ring, Series};

/// The basis `phi_alpha` of `K^0(X)` with its Euler pairing `g_{ab} = chi(phi_a phi_b)`.
///
/// `phi_0` is always the unit class `1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetBasis {
    pairing: Vec<Vec<CycloRational>>,
    inverse: Vec<Vec<CycloRational>>,
}

impl TargetBasis {
    pub fn new(pairing: Vec<Vec<CycloRational>>) -> Result<Self> {
        let n = pairing.len();
        if n == 0 || pairing.iter().any(|row| row.len() != n) {
            return Err(Error::BasisMismatch("pairing matrix must be square and nonempty".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if pairing[i][j] != pairing[j][i] {
                    return Err(Error::BasisMismatch("pairing matrix is not symmetric".into()));
                }
            }
            for v in &pairing[i] {
                if v.as_rational().is_none() {
                    return Err(Error::BasisMismatch("pairing entries must be rational".into()));
                }
            }
        }
        let inverse = invert_scalar_matrix(&pairing).ok_or(Error::SingularMatrix)?;
        Ok(Self { pairing, inverse })
    }

    /// Rank-one target `X = pt` with `(1, 1) = 1`.
    pub fn point() -> Self {
        Self::new(vec![vec![CycloRational::one()]]).expect("point pairing is invertible")
    }

    pub fn rank(&self) -> usize {
        self.pairing.len()
    }

    pub fn pairing(&self) -> &[Vec<CycloRational>] {
        &self.pairing
    }

    pub fn pairing_inverse(&self) -> &[Vec<CycloRational>] {
        &self.inverse
    }

    pub fn is_point(&self) -> bool {
        self.rank() == 1 && self.pairing[0][0].is_one()
    }
}

/// Gauss-Jordan elimination over the field.
pub fn invert_scalar_matrix(m: &[Vec<CycloRational>]) -> Option<Vec<Vec<CycloRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<CycloRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { CycloRational::one() } else { CycloRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].inverse().ok()?;
        for v in a[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let sub = &f * &a[col][c];
                    a[r][c] -= &sub;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// An element of `K = K^0(X) (x) Lambda` in the basis `phi_alpha`.
#[derive(Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct KVector {
    comps: Vec<Series>,
}

impl KVector {
    pub fn new(comps: Vec<Series>) -> Self {
        assert!(!comps.is_empty(), "KVector needs at least one component");
        Self { comps }
    }

    pub fn zero(ring: &Ring, rank: usize) -> Self {
        Self::new(vec![Series::zero(ring); rank])
    }

    /// `c * phi_alpha`.
    pub fn basis(ring: &Ring, rank: usize, alpha: usize, c: Series) -> Self {
        let mut v = Self::zero(ring, rank);
        v.comps[alpha] = c;
        v
    }

    /// Rank-one vector holding a scalar.
    pub fn scalar(s: Series) -> Self {
        Self::new(vec![s])
    }

    /// `c * 1`, the unit class being `phi_0`.
    pub fn unit(ring: &Ring, rank: usize, c: Series) -> Self {
        Self::basis(ring, rank, 0, c)
    }

    pub fn rank(&self) -> usize {
        self.comps.len()
    }

    /// Applies `f` componentwise (used to move between rings).
    pub fn try_map(&self, f: impl Fn(&Series) -> Result<Series>) -> Result<Self> {
        Ok(Self::new(self.comps.iter().map(f).collect::<Result<Vec<_>>>()?))
    }

    pub fn ring(&self) -> &Ring {
        self.comps[0].ring()
    }

    pub fn comps(&self) -> &[Series] {
        &self.comps
    }

    pub fn comp(&self, alpha: usize) -> &Series {
        &self.comps[alpha]
    }

    pub fn comp_mut(&mut self, alpha: usize) -> &mut Series {
        &mut self.comps[alpha]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Series::is_zero)
    }

    /// Minimum filtration order over components; `None` for zero.
    pub fn filtration_order(&self) -> Option<u32> {
        self.comps.iter().filter_map(Series::filtration_order).min()
    }

    pub fn scale(&self, s: &Series) -> Self {
        Self::new(self.comps.iter().map(|c| c * s).collect())
    }

    pub fn scale_c(&self, c: &CycloRational) -> Self {
        Self::new(self.comps.iter().map(|x| x.scale(c)).collect())
    }

    pub fn truncated(&self, order: u32) -> Self {
        Self::new(self.comps.iter().map(|c| c.truncated(order)).collect())
    }

    pub fn adams_novikov(&self, r: u32) -> Self {
        Self::new(self.comps.iter().map(|c| c.adams_novikov(r)).collect())
    }

    fn check_rank(&self, other: &Self) {
        assert_eq!(self.rank(), other.rank(), "KVector rank mismatch");
    }
}

impl AddAssign<&KVector> for KVector {
    fn add_assign(&mut self, rhs: &KVector) {
        self.check_rank(rhs);
        for (a, b) in self.comps.iter_mut().zip(&rhs.comps) {
            *a += b;
        }
    }
}

impl SubAssign<&KVector> for KVector {
    fn sub_assign(&mut self, rhs: &KVector) {
        self.check_rank(rhs);
        for (a, b) in self.comps.iter_mut().zip(&rhs.comps) {
            *a -= b;
        }
    }
}

impl Add for &KVector {
    type Output = KVector;
    fn add(self, rhs: &KVector) -> KVector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &KVector {
    type Output = KVector;
    fn sub(self, rhs: &KVector) -> KVector {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &KVector {
    type Output = KVector;
    fn neg(self) -> KVector {
        self.scale_c(&CycloRational::from_int(-1))
    }
}

impl fmt::Debug for KVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank() == 1 {
            write!(f, "{}", self.comps[0])
        } else {
            f.debug_list().entries(&self.comps).finish()
        }
    }
}
