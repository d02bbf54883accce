//! The fixed point `tau`, the matrices `A_r` and the Jacobian check.

use serde::Serialize;

use super::linalg::{self, SeriesMatrix};
use super::sop::{basis_insertion, compute_g, GMatrix};
use super::AInsertion;
use crate::correlators::{Backend, Insertion, TauVector};
use crate::error::{Error, Result};
use crate::qfun::{d_operator, jet_at_root, KVector, LaurentQ, RationalQ};
use crate::ring::{CycloRational, Ring, Series};

/// Iterates of `T` and the filtration orders of their successive gaps.
#[derive(Debug, Clone, Serialize)]
pub struct TauRun {
    pub tau: TauVector,
    pub iterates: Vec<TauVector>,
    /// `ord(tau^{(n+1)} - tau^{(n)})`; `None` is infinity.
    pub gap_orders: Vec<Option<u32>>,
    pub iterations: usize,
}

impl TauRun {
    /// Gap orders strictly increase until the gap vanishes.
    pub fn gaps_increase(&self) -> bool {
        self.gap_orders.windows(2).all(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => b > a,
            (Some(_), None) => true,
            (None, None) => true,
            (None, Some(_)) => false,
        })
    }
}

/// `T(tau)_r = t_r(1) + R_r[sum <<L D t_r(L), phi_a>>_{0,2_1} G_r^{ab} phi_b]`.
pub fn tau_map(backend: &Backend, t: &[LaurentQ], tau: &TauVector) -> Result<TauVector> {
    let ring = tau.levels()[0].ring().clone();
    let n = backend.target().rank();
    let mut out = TauVector::zero(&ring, n, tau.r_max());
    for (i, tr) in t.iter().enumerate() {
        let r = i as u32 + 1;
        let mut value = tr.eval_at(&CycloRational::one())?;
        let ldt = d_operator(tr).shift(1);
        if !ldt.is_zero() {
            let g = compute_g(backend, tau, r)?;
            let mut brackets = Vec::with_capacity(n);
            for a in 0..n {
                let ins = [Insertion::new(1, ldt.clone()), basis_insertion(&ring, n, 1, a)];
                brackets.push(backend.double_bracket(0, &ins, tau, r)?);
            }
            value += &linalg::row_times(&KVector::new(brackets), &g.inverse);
        }
        out.set(r, value);
    }
    Ok(out)
}

/// `tau = lim T^n(0)`; at most `N + 2` applications of `T`.
pub fn compute_tau(backend: &Backend, ring: &Ring, t: &[LaurentQ]) -> Result<TauRun> {
    let n = backend.target().rank();
    let limit = ring.order() as usize + 2;
    let mut tau = TauVector::zero(ring, n, t.len().max(1) as u32);
    let mut iterates = vec![tau.clone()];
    let mut gap_orders = Vec::new();
    for step in 1..=limit {
        let next = tau_map(backend, t, &tau)?;
        let gap = next.sub(&tau).filtration_order();
        gap_orders.push(gap);
        iterates.push(next.clone());
        tau = next;
        if gap.is_none() {
            backend.take_missing()?;
            return Ok(TauRun {
                tau,
                iterates,
                gap_orders,
                iterations: step,
            });
        }
    }
    backend.take_missing()?;
    Err(Error::NoConvergence(limit))
}

/// First jet coefficient `tbar'_{r,1}` (coefficient of `q - 1`).
pub fn tbar_derivative(tbar: &LaurentQ) -> Result<KVector> {
    Ok(jet_at_root(&RationalQ::from_laurent(tbar.clone()), &CycloRational::one())?.derivative)
}

/// `A_r = [sum_c G_r^{ac} R_r <<phi_c, tbar', phi_b>>_{0,3_1}]`.
pub fn compute_a(backend: &Backend, tau: &TauVector, g: &GMatrix, tbar_jet: &KVector) -> Result<SeriesMatrix> {
    let ring = tau.levels()[0].ring().clone();
    let n = backend.target().rank();
    let mut b: SeriesMatrix = vec![vec![Series::zero(&ring); n]; n];
    if !tbar_jet.is_zero() {
        for (c, row) in b.iter_mut().enumerate() {
            for (beta, entry) in row.iter_mut().enumerate() {
                let ins = [
                    basis_insertion(&ring, n, 1, c),
                    Insertion::constant(1, tbar_jet.clone()),
                    basis_insertion(&ring, n, 1, beta),
                ];
                *entry = backend.double_bracket(0, &ins, tau, g.level)?;
            }
        }
    }
    Ok(linalg::mul(&g.inverse, &b))
}

/// Which jet enters `A_r`.
pub fn a_jet(flag: AInsertion, r: u32, tbars: &[LaurentQ]) -> Result<KVector> {
    let idx = match flag {
        AInsertion::LevelR => r as usize - 1,
        AInsertion::Level1 => 0,
    };
    tbar_derivative(&tbars[idx])
}

/// `d tau_r / d t_{r,0}` by perturbing `t_{r,0}` with a fresh parameter and
/// extracting its linear coefficient; exact modulo `Lambda_+^N`.
pub fn perturbation_jacobian(backend: &Backend, ring: &Ring, t: &[LaurentQ], r: u32) -> Result<SeriesMatrix> {
    let delta = "__delta";
    let big = ring.with_extra_variable(delta)?;
    let n = backend.target().rank();
    let mut lifted: Vec<LaurentQ> = t
        .iter()
        .map(|tr| tr.try_map_ring(&big, |s| s.embed(&big)))
        .collect::<Result<_>>()?;
    if lifted.len() < r as usize {
        lifted.resize(r as usize, LaurentQ::zero(&big, n));
    }
    let mut jac: SeriesMatrix = vec![vec![Series::zero(ring); n]; n];
    for beta in 0..n {
        let mut tp = lifted.clone();
        tp[r as usize - 1] += &LaurentQ::constant(KVector::basis(&big, n, beta, Series::var(&big, delta)?));
        let run = compute_tau(backend, &big, &tp)?;
        let col = run.tau.levels()[r as usize - 1].clone();
        for (alpha, row) in jac.iter_mut().enumerate() {
            row[beta] = col.comp(alpha).coefficient_of(delta, 1)?.restrict(ring)?;
        }
    }
    Ok(jac)
}
