//! Small dense matrices over the truncated series ring.

use crate::error::{Error, Result};
use crate::qfun::{invert_scalar_matrix, KVector};
use crate::ring::{CycloRational, Ring, Series};

pub type SeriesMatrix = Vec<Vec<Series>>;

pub fn identity(ring: &Ring, n: usize) -> SeriesMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Series::one(ring) } else { Series::zero(ring) })
                .collect()
        })
        .collect()
}

pub fn from_scalars(ring: &Ring, m: &[Vec<CycloRational>]) -> SeriesMatrix {
    m.iter()
        .map(|row| row.iter().map(|c| Series::constant(ring, c.clone())).collect())
        .collect()
}

pub fn mul(a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let ring = a[0][0].ring();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Series::zero(ring);
                    for (k, bk) in b.iter().enumerate() {
                        acc += &(&a[i][k] * &bk[j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn add(a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn sub(a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn is_zero(a: &SeriesMatrix) -> bool {
    a.iter().all(|r| r.iter().all(Series::is_zero))
}

pub fn truncated(a: &SeriesMatrix, order: u32) -> SeriesMatrix {
    a.iter().map(|r| r.iter().map(|x| x.truncated(order)).collect()).collect()
}

/// Inverse over the local ring: `(P + E)^{-1} = sum_k (-P^{-1} E)^k P^{-1}` with `P` the constant part.
pub fn inverse(a: &SeriesMatrix) -> Result<SeriesMatrix> {
    let ring = a[0][0].ring().clone();
    let p: Vec<Vec<CycloRational>> = a.iter().map(|r| r.iter().map(Series::constant_term).collect()).collect();
    let pinv = from_scalars(&ring, &invert_scalar_matrix(&p).ok_or(Error::SingularMatrix)?);
    let e = sub(a, &from_scalars(&ring, &p));
    let step: SeriesMatrix = mul(&pinv, &e)
        .into_iter()
        .map(|r| r.into_iter().map(|x| -&x).collect())
        .collect();
    let mut acc = identity(&ring, a.len());
    let mut power = identity(&ring, a.len());
    for _ in 0..ring.order() {
        power = mul(&power, &step);
        if is_zero(&power) {
            break;
        }
        acc = add(&acc, &power);
    }
    Ok(mul(&acc, &pinv))
}

/// `sum_{k <= N} A^k = (I - A)^{-1}` for `A` with entries in the maximal ideal.
pub fn geometric_series(a: &SeriesMatrix) -> SeriesMatrix {
    let ring = a[0][0].ring().clone();
    let mut acc = identity(&ring, a.len());
    let mut power = identity(&ring, a.len());
    for _ in 0..ring.order() {
        power = mul(&power, a);
        if is_zero(&power) {
            break;
        }
        acc = add(&acc, &power);
    }
    acc
}

/// Determinant by cofactor expansion (ranks are tiny).
pub fn det(a: &SeriesMatrix) -> Series {
    let n = a.len();
    let ring = a[0][0].ring();
    match n {
        1 => a[0][0].clone(),
        _ => {
            let mut acc = Series::zero(ring);
            for j in 0..n {
                let minor: SeriesMatrix = a[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &a[0][j] * &det(&minor);
                if j % 2 == 0 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
            acc
        }
    }
}

/// `v^T M`: the row vector `sum_a v_a M[a][b]` as a K-vector.
pub fn row_times(v: &KVector, m: &SeriesMatrix) -> KVector {
    let ring = v.ring();
    let n = v.rank();
    KVector::new(
        (0..n)
            .map(|b| {
                let mut acc = Series::zero(ring);
                for a in 0..n {
                    acc += &(v.comp(a) * &m[a][b]);
                }
                acc
            })
            .collect(),
    )
}

/// `M v`.
pub fn times_column(m: &SeriesMatrix, v: &KVector) -> KVector {
    let ring = v.ring();
    KVector::new(
        m.iter()
            .map(|row| {
                let mut acc = Series::zero(ring);
                for (x, y) in row.iter().zip(v.comps()) {
                    acc += &(x * y);
                }
                acc
            })
            .collect(),
    )
}

pub fn column(m: &SeriesMatrix, j: usize) -> KVector {
    KVector::new(m.iter().map(|r| r[j].clone()).collect())
}
