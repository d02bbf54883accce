//! `G`, the S-operator and the ancestor input `tbar`.

use serde::Serialize;

use super::linalg::{self, SeriesMatrix};
use crate::correlators::{resum, Backend, Insertion, TauVector, MAX_RESUM_TERMS};
use crate::error::Result;
use crate::qfun::{laurent_part, KVector, LaurentQ, RationalQ, TargetBasis};
use crate::ring::{Ring, Series};

/// `G_{ab} = (phi_a, phi_b) + R_r <<phi_a, phi_b>>_{0,2_1}` and its inverse.
#[derive(Debug, Clone, Serialize)]
pub struct GMatrix {
    pub level: u32,
    pub g: SeriesMatrix,
    pub inverse: SeriesMatrix,
}

pub(crate) fn basis_insertion(ring: &Ring, rank: usize, r: u32, alpha: usize) -> Insertion {
    Insertion::constant(r, KVector::basis(ring, rank, alpha, Series::one(ring)))
}

pub fn compute_g(backend: &Backend, tau: &TauVector, r: u32) -> Result<GMatrix> {
    let ring = tau.levels()[0].ring().clone();
    let target = backend.target();
    let n = target.rank();
    let mut g = linalg::from_scalars(&ring, target.pairing());
    for a in 0..n {
        for b in 0..n {
            let ins = [basis_insertion(&ring, n, 1, a), basis_insertion(&ring, n, 1, b)];
            g[a][b] += &backend.double_bracket(0, &ins, tau, r)?;
        }
    }
    let inverse = linalg::inverse(&g)?;
    Ok(GMatrix { level: r, g, inverse })
}

/// `S_r(q)` on basis vectors: column `c` is `S_r(q) phi_c` as a rational function of `q`.
#[derive(Debug, Clone)]
pub struct SOperator {
    pub level: u32,
    pub columns: Vec<RationalQ>,
}

/// `S_r(q) phi_c = sum ((phi_c, phi_a) + R_r <<phi_c / (1 - L/q), phi_a>>) G_r^{ab} phi_b`.
pub fn compute_s(backend: &Backend, tau: &TauVector, g: &GMatrix) -> Result<SOperator> {
    let ring = tau.levels()[0].ring().clone();
    let target: &TargetBasis = backend.target();
    let n = target.rank();
    let r = g.level;
    let mut columns = Vec::with_capacity(n);
    for c in 0..n {
        let series = resum(
            |k| {
                let mut comps = Vec::with_capacity(n);
                for a in 0..n {
                    let desc = Insertion::new(
                        1,
                        LaurentQ::monomial(k as i32, KVector::basis(&ring, n, c, Series::one(&ring))),
                    );
                    comps.push(backend.double_bracket(0, &[desc, basis_insertion(&ring, n, 1, a)], tau, r)?);
                }
                Ok(KVector::new(comps))
            },
            MAX_RESUM_TERMS,
        )?;
        let pairing = KVector::new(
            (0..n)
                .map(|a| Series::constant(&ring, target.pairing()[c][a].clone()))
                .collect(),
        );
        let w = &RationalQ::from_laurent(LaurentQ::constant(pairing)) + &series.in_inverse_q(&ring, n)?;
        columns.push(w.map_coeffs(n, |v| linalg::row_times(v, &g.inverse)));
    }
    Ok(SOperator { level: r, columns })
}

impl SOperator {
    /// `S(q) f(q)` extended `q`-linearly over the terms of `f`.
    pub fn apply(&self, f: &LaurentQ) -> RationalQ {
        let ring = f.ring().clone();
        let n = f.rank();
        let mut acc = RationalQ::zero(&ring, n);
        for (m, v) in f.terms() {
            for (c, coeff) in v.comps().iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                acc = &acc + &self.columns[c].scale(coeff).shift(m);
            }
        }
        acc
    }
}

/// `tbar_r = [S_r(v + t_r)]_+ - v` with `v = 1 - q`.
pub fn compute_tbar(s: &SOperator, t: &LaurentQ) -> LaurentQ {
    let v = LaurentQ::dilaton_shift(t.ring(), t.rank());
    let mut input = v.clone();
    input += t;
    let mut out = laurent_part(&s.apply(&input));
    out -= &v;
    out
}
