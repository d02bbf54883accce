//! `y` classes, the `F_{1,M}` assemblies and the genus-1 total.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::linalg::{self, SeriesMatrix};
use super::sop::{compute_g, compute_s, compute_tbar, GMatrix};
use super::tau::{a_jet, compute_a, compute_tau, TauRun};
use super::{ReconstructionInput, Toggles, YSign};
use crate::correlators::{resum, Backend, CorrelatorKey, Slot, TauVector, MAX_RESUM_TERMS};
use crate::error::{Error, Result};
use crate::qfun::{
    residue_form, subst_inverse_power, t2_new_transform, KVector, LaurentQ, RationalQ, ResiduePoint,
};
use crate::ring::{CycloRational, Ring, Series};

/// The cases `M` of the permutative contributions.
pub const CASES: [u32; 4] = [2, 3, 4, 6];
/// Levels whose `tbar`, `G`, `S` are always computed.
const LEVELS: u32 = 6;

/// Everything computed on the way to the genus-1 total.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub ring: Ring,
    pub rank: usize,
    pub toggles: Toggles,
    pub tau_run: TauRun,
    pub g: BTreeMap<u32, GMatrix>,
    /// `tbar_r` for `r = 1..=6`.
    pub tbar: Vec<LaurentQ>,
    /// `xbar_r = (1 - q) + tbar_r`.
    pub xbar: Vec<LaurentQ>,
    pub a: BTreeMap<u32, SeriesMatrix>,
    /// `(I - A_r)^{-1}`.
    pub jacobian: BTreeMap<u32, SeriesMatrix>,
    pub y: BTreeMap<u32, RationalQ>,
    pub tbar2_new: RationalQ,
    pub y2l: RationalQ,
}

impl Pipeline {
    pub fn tau(&self) -> &TauVector {
        &self.tau_run.tau
    }

    pub fn xbar(&self, r: u32) -> &LaurentQ {
        &self.xbar[r as usize - 1]
    }
}

/// `<<a_1(q), ..., a_m(q)>>_g` for slot contents constant in `L`, rational in `q`.
pub fn bracket_rational(
    backend: &Backend,
    genus: u32,
    slots: &[(u32, RationalQ)],
    tau: &TauVector,
    shift: u32,
) -> Result<RationalQ> {
    let ring = tau.levels()[0].ring().clone();
    let n = backend.target().rank();
    let mut acc = RationalQ::zero(&ring, 1);
    let mut tuple = vec![0usize; slots.len()];
    loop {
        let mut coeff = RationalQ::from_laurent(LaurentQ::constant(KVector::scalar(Series::one(&ring))));
        for ((_, content), alpha) in slots.iter().zip(&tuple) {
            coeff = coeff.mul_scalar(&content.component(*alpha));
            if coeff.is_zero() {
                break;
            }
        }
        if !coeff.is_zero() {
            let ins: Vec<_> = slots
                .iter()
                .zip(&tuple)
                .map(|((r, _), alpha)| super::sop::basis_insertion(&ring, n, *r, *alpha))
                .collect();
            let value = backend.double_bracket(genus, &ins, tau, shift)?;
            if !value.is_zero() {
                acc = &acc + &coeff.scale(&value);
            }
        }
        if !next_tuple(&mut tuple, n) {
            return Ok(acc);
        }
    }
}

fn next_tuple(t: &mut [usize], n: usize) -> bool {
    for x in t.iter_mut() {
        *x += 1;
        if *x < n {
            return true;
        }
        *x = 0;
    }
    false
}

fn constant_rational(v: KVector) -> RationalQ {
    RationalQ::from_laurent(LaurentQ::constant(v))
}

/// `xbar_1(q) -/+ sum phi_a G_1^{ab} <<phi_b, w (on an r-cycle), xbar_1(q)>>_{0,1_1+1_r+1_1}`.
fn y_class(
    backend: &Backend,
    tau: &TauVector,
    g1: &GMatrix,
    xbar1: &LaurentQ,
    w: &RationalQ,
    r: u32,
    sign: YSign,
) -> Result<RationalQ> {
    let ring = xbar1.ring().clone();
    let n = xbar1.rank();
    let x = RationalQ::from_laurent(xbar1.clone());
    let mut correction = RationalQ::zero(&ring, n);
    for beta in 0..n {
        let phi = constant_rational(KVector::basis(&ring, n, beta, Series::one(&ring)));
        let rb = bracket_rational(backend, 0, &[(1, phi), (r, w.clone()), (1, x.clone())], tau, 1)?;
        if rb.is_zero() {
            continue;
        }
        for alpha in 0..n {
            let gab = &g1.inverse[alpha][beta];
            if !gab.is_zero() {
                correction = &correction + &rb.scale(gab).place(alpha, n);
            }
        }
    }
    Ok(match sign {
        YSign::Plus => &x + &correction,
        YSign::Minus => &x - &correction,
    })
}

/// `y_r` built from the truncated chain `sum_{k=1}^{terms} A_r^k e_1` instead of `(I - A_r)^{-1} e_1 - e_1`.
pub fn chain_sum_y(backend: &Backend, p: &Pipeline, r: u32, terms: u32) -> Result<RationalQ> {
    let a = &p.a[&r];
    let unit = KVector::unit(&p.ring, p.rank, Series::one(&p.ring));
    let mut w = KVector::zero(&p.ring, p.rank);
    let mut power = unit;
    for _ in 0..terms {
        power = linalg::times_column(a, &power);
        w += &power;
    }
    y_class(
        backend,
        p.tau(),
        &p.g[&1],
        p.xbar(1),
        &constant_rational(w),
        r,
        p.toggles.y_sign,
    )
}

/// `tbar_r = [S_r t_r]_+` at `tau` for the input levels, without the residual check.
pub fn ancestor_inputs(backend: &Backend, tau: &TauVector, t: &[LaurentQ]) -> Result<Vec<LaurentQ>> {
    let mut out = Vec::with_capacity(t.len());
    for (i, tr) in t.iter().enumerate() {
        let g = compute_g(backend, tau, i as u32 + 1)?;
        let s = compute_s(backend, tau, &g)?;
        out.push(compute_tbar(&s, tr));
    }
    backend.take_missing()?;
    Ok(out)
}

pub fn run_pipeline(backend: &Backend, input: &ReconstructionInput) -> Result<Pipeline> {
    if input.t.is_empty() {
        return Err(Error::InvalidConfig("at least one input level is required".into()));
    }
    let ring = input.ring.clone();
    let n = backend.target().rank();
    for (i, t) in input.t.iter().enumerate() {
        if t.rank() != n {
            return Err(Error::BasisMismatch(format!("t_{} has rank {}, target has {n}", i + 1, t.rank())));
        }
        if let Some(0) = t.filtration_order() {
            return Err(Error::InvalidConfig(format!("t_{} is not in the maximal ideal", i + 1)));
        }
    }
    let tau_run = compute_tau(backend, &ring, &input.t)?;
    let tau = tau_run.tau.clone();

    let mut g = BTreeMap::new();
    let mut tbar = Vec::new();
    let mut xbar = Vec::new();
    for r in 1..=LEVELS {
        let gr = compute_g(backend, &tau, r)?;
        let s = compute_s(backend, &tau, &gr)?;
        let t = input
            .t
            .get(r as usize - 1)
            .cloned()
            .unwrap_or_else(|| LaurentQ::zero(&ring, n));
        let tb = compute_tbar(&s, &t);
        let residual = tb.eval_at(&CycloRational::one())?;
        if !residual.is_zero() {
            return Err(Error::FixedPointResidual {
                level: r as usize,
                order: residual.filtration_order().map_or("inf".into(), |o| o.to_string()),
                truncation: ring.order(),
            });
        }
        let mut xb = LaurentQ::dilaton_shift(&ring, n);
        xb += &tb;
        g.insert(r, gr);
        tbar.push(tb);
        xbar.push(xb);
    }
    backend.take_missing()?;

    let mut a = BTreeMap::new();
    let mut jacobian = BTreeMap::new();
    for r in [1, 2, 3, 4, 6] {
        let jet = a_jet(input.toggles.a_insertion, r, &tbar)?;
        let ar = compute_a(backend, &tau, &g[&r], &jet)?;
        jacobian.insert(r, linalg::geometric_series(&ar));
        a.insert(r, ar);
    }
    backend.take_missing()?;

    let unit = KVector::unit(&ring, n, Series::one(&ring));
    let mut y = BTreeMap::new();
    for r in CASES {
        let w = &linalg::column(&jacobian[&r], 0) - &unit;
        let yr = y_class(
            backend,
            &tau,
            &g[&1],
            &xbar[0],
            &constant_rational(w),
            r,
            input.toggles.y_sign,
        )?;
        y.insert(r, yr);
    }
    let tbar2_new = t2_new_transform(&tbar[1])?;
    let y2l = y_class(backend, &tau, &g[&1], &xbar[0], &tbar2_new, 2, input.toggles.y_sign)?;
    backend.take_missing()?;

    Ok(Pipeline {
        ring,
        rank: n,
        toggles: input.toggles,
        tau_run,
        g,
        tbar,
        xbar,
        a,
        jacobian,
        y,
        tbar2_new,
        y2l,
    })
}

/// Variable in which an `F_{1,M}` is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotVar {
    /// `x`, with `q = x^{-1}` substituted and the descendant slot `1/(1 - x Lbar)`.
    X,
    /// `q` itself, with the descendant slot `1/(1 - q^{-1} Lbar)`.
    Q,
}

fn ancestor_bracket(
    backend: &Backend,
    tau: &TauVector,
    desc: &RationalQ,
    others: &[(u32, RationalQ)],
    var: SlotVar,
) -> Result<RationalQ> {
    let ring = tau.levels()[0].ring().clone();
    let n = backend.target().rank();
    let dressing = backend.ancestor_dressing(tau)?;
    let mut acc = RationalQ::zero(&ring, 1);
    let mut tuple = vec![0usize; others.len() + 1];
    loop {
        let mut coeff = desc.component(tuple[0]);
        for ((_, content), alpha) in others.iter().zip(&tuple[1..]) {
            if coeff.is_zero() {
                break;
            }
            coeff = coeff.mul_scalar(&content.component(*alpha));
        }
        if !coeff.is_zero() {
            let rest: Vec<Slot> = others
                .iter()
                .zip(&tuple[1..])
                .map(|((r, _), alpha)| Slot::new(*r, 0, *alpha))
                .collect();
            let gamma = tuple[0];
            let series = resum(
                |k| {
                    let mut slots = rest.clone();
                    slots.push(Slot::new(1, k as i32, gamma));
                    let v = backend.correlator(&CorrelatorKey::new(1, 0, slots));
                    Ok(KVector::scalar(Series::constant(&ring, v)))
                },
                MAX_RESUM_TERMS,
            )?;
            let closed = match var {
                SlotVar::X => series.in_x(&ring, 1)?,
                SlotVar::Q => series.in_inverse_q(&ring, 1)?,
            };
            acc = &acc + &coeff.mul_scalar(&closed);
        }
        if !next_tuple(&mut tuple, n) {
            break;
        }
    }
    Ok(acc.scale(&dressing))
}

/// `F_{1,M}` as a rational function of `x` (or of `q = 1/x` with [`SlotVar::Q`]).
pub fn assemble_f1m(backend: &Backend, p: &Pipeline, m: u32, var: SlotVar) -> Result<RationalQ> {
    let sub = |f: &RationalQ, r: u32| -> Result<RationalQ> {
        match var {
            SlotVar::X => subst_inverse_power(f, r),
            SlotVar::Q if r == 1 => Ok(f.clone()),
            SlotVar::Q => Err(Error::Unsupported("q-form only exists for M = 2, 3".into())),
        }
    };
    let xb = |r: u32| RationalQ::from_laurent(p.xbar(r).clone());
    let (prefactor, desc, others) = match m {
        2 => {
            let y2 = sub(&p.y[&2], 1)?;
            (
                CycloRational::from_frac(1, 24),
                sub(&p.y2l, 1)?,
                vec![(1, y2.clone()), (1, y2.clone()), (1, y2)],
            )
        }
        3 => (
            CycloRational::from_frac(1, 6),
            sub(&p.y[&3], 1)?,
            vec![(1, sub(&xb(1), 1)?), (1, sub(&xb(1), 1)?)],
        ),
        4 => (
            CycloRational::from_frac(1, 4),
            sub(&p.y[&4], 1)?,
            vec![(1, sub(&xb(1), 1)?), (2, sub(&xb(2), 2)?)],
        ),
        6 => (
            CycloRational::from_frac(1, 6),
            sub(&p.y[&6], 1)?,
            vec![(2, sub(&xb(2), 2)?), (3, sub(&xb(3), 3)?)],
        ),
        _ => return Err(Error::InvalidConfig(format!("no permutative case M = {m}"))),
    };
    let f = ancestor_bracket(backend, p.tau(), &desc, &others, var)?;
    backend.take_missing()?;
    Ok(f.scale_c(&prefactor))
}

/// `Res_0` and `Res_inf` of `F_{1,M}(x) dx/x`.
#[derive(Debug, Clone, Serialize)]
pub struct CaseResidues {
    pub m: u32,
    pub at_zero: Series,
    pub at_infinity: Series,
}

impl CaseResidues {
    pub fn sum(&self) -> Series {
        &self.at_zero + &self.at_infinity
    }
}

/// `(Res_{0,inf} F_{1,2}(x) dx/x, Res_{-1} F_{1,2}(q) dq/q)`.
pub fn case2_residue_identity(backend: &Backend, p: &Pipeline) -> Result<(Series, Series)> {
    let fx = assemble_f1m(backend, p, 2, SlotVar::X)?;
    let fq = assemble_f1m(backend, p, 2, SlotVar::Q)?;
    let lhs = &residue_form(&fx, &ResiduePoint::Zero)?.comp(0).clone()
        + residue_form(&fx, &ResiduePoint::Infinity)?.comp(0);
    let rhs = residue_form(&fq, &ResiduePoint::Root(CycloRational::from_int(-1)))?
        .comp(0)
        .clone();
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    pub order: u32,
    pub toggles: Toggles,
    pub tau: TauVector,
    pub tau_iterations: usize,
    pub gap_orders: Vec<Option<u32>>,
    pub tbar: Vec<LaurentQ>,
    pub tbar_residual_order: Vec<Option<u32>>,
    pub f1_tau: Series,
    pub logdet: Series,
    pub residues: Vec<CaseResidues>,
    pub total: Series,
}

/// `F_1(tau) + (1/24) log det (I - A_1)^{-1} + sum_M (Res_0 + Res_inf) F_{1,M}(x) dx/x`.
pub fn theorem1(backend: &Backend, input: &ReconstructionInput) -> Result<Theorem1Report> {
    let p = run_pipeline(backend, input)?;
    let ring = p.ring.clone();
    let tau = p.tau().clone();
    // genus-1 stages run to completion so that missing keys are reported together
    let mut missing = BTreeSet::new();
    let mut absorb = |r: Result<Series>| match r {
        Err(Error::MissingEntries(keys)) => {
            missing.extend(keys);
            Ok(Series::zero(&ring))
        }
        other => other,
    };
    let f1_tau = absorb(backend.double_bracket(1, &[], &tau, 1).and_then(|v| backend.take_missing().map(|_| v)))?;
    let logdet = linalg::det(&p.jacobian[&1])
        .log_unit()?
        .scale(&CycloRational::from_frac(1, 24));
    let mut total = &f1_tau + &logdet;
    let mut residues = Vec::new();
    for m in CASES {
        let f = match assemble_f1m(backend, &p, m, SlotVar::X) {
            Err(Error::MissingEntries(keys)) => {
                absorb(Err(Error::MissingEntries(keys)))?;
                continue;
            }
            other => other?,
        };
        let case = CaseResidues {
            m,
            at_zero: residue_form(&f, &ResiduePoint::Zero)?.comp(0).clone(),
            at_infinity: residue_form(&f, &ResiduePoint::Infinity)?.comp(0).clone(),
        };
        total += &case.sum();
        residues.push(case);
    }
    if !missing.is_empty() {
        return Err(Error::MissingEntries(missing.into_iter().collect()));
    }
    let r_max = input.t.len();
    Ok(Theorem1Report {
        order: ring.order(),
        toggles: input.toggles,
        tau,
        tau_iterations: p.tau_run.iterations,
        gap_orders: p.tau_run.gap_orders.clone(),
        tbar: p.tbar[..r_max].to_vec(),
        tbar_residual_order: p.tbar[..r_max]
            .iter()
            .map(|t| t.eval_at(&CycloRational::one()).ok().and_then(|v| v.filtration_order()))
            .collect(),
        f1_tau,
        logdet,
        residues,
        total,
    })
}
