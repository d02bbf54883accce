//! Two-variable check of the genus-0 WDVV identity
//!
//! ```text
//! (phi, psi) + (1 - xy) <<phi/(1 - xL), psi/(1 - yL)>>
//!   = sum ((phi, phi_a) + <<phi/(1 - xL), phi_a>>) G^{ab} ((phi_b, psi) + <<phi_b, psi/(1 - yL)>>)
//! ```
//!
//! Each bracket is fitted by polynomials in the descendant exponents, so
//! `sum_k C(k, a) x^k = x^a / (1 - x)^{a + 1}` closes it; both sides are then
//! multiplied by `(1 - x)^{A + 1} (1 - y)^{B + 1}` and compared as polynomials.

use std::collections::BTreeMap;

use serde::Serialize;

use super::sop::{basis_insertion, compute_g};
use crate::correlators::{Backend, Insertion, TauVector};
use crate::error::{Error, Result};
use crate::qfun::{KVector, LaurentQ};
use crate::ring::{binomial, CycloRational, Ring, Series};

type Poly2 = BTreeMap<(u32, u32), Series>;

fn p_add(a: &mut Poly2, b: &Poly2) {
    for (k, v) in b {
        let e = a.entry(*k).or_insert_with(|| Series::zero(v.ring()));
        *e += v;
        if e.is_zero() {
            a.remove(k);
        }
    }
}

fn p_mul(a: &Poly2, b: &Poly2) -> Poly2 {
    let mut out = Poly2::new();
    for ((i, j), x) in a {
        for ((k, l), y) in b {
            let term = Poly2::from([((i + k, j + l), x * y)]);
            p_add(&mut out, &term);
        }
    }
    out
}

fn p_scale(a: &Poly2, s: &Series) -> Poly2 {
    let mut out = Poly2::new();
    for (k, v) in a {
        p_add(&mut out, &Poly2::from([(*k, v * s)]));
    }
    out
}

/// `(1 - x)^e` in the first (`second = false`) or second variable.
fn one_minus_pow(ring: &Ring, e: u32, second: bool) -> Poly2 {
    let mut out = Poly2::new();
    for j in 0..=e {
        let c = binomial(i64::from(e), j);
        let c = if j % 2 == 1 { -c } else { c };
        let key = if second { (0, j) } else { (j, 0) };
        p_add(&mut out, &Poly2::from([(key, Series::constant(ring, CycloRational::from_rational(c)))]));
    }
    out
}

/// Newton coefficients of a grid `e[k][m]`, i.e. `e = sum E_{ab} C(k, a) C(m, b)`.
fn newton_2d(grid: &[Vec<Series>]) -> Vec<Vec<Series>> {
    let diff = |row: &[Series]| -> Vec<Series> {
        let mut out = Vec::with_capacity(row.len());
        let mut cur = row.to_vec();
        while !cur.is_empty() {
            out.push(cur[0].clone());
            cur = cur.windows(2).map(|w| &w[1] - &w[0]).collect();
        }
        out
    };
    let rows: Vec<Vec<Series>> = grid.iter().map(|r| diff(r)).collect();
    let width = rows[0].len();
    let mut out = vec![Vec::new(); rows.len()];
    for b in 0..width {
        let col: Vec<Series> = rows.iter().map(|r| r[b].clone()).collect();
        for (a, v) in diff(&col).into_iter().enumerate() {
            out[a].push(v);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct WdvvOutcome {
    pub phi: usize,
    pub psi: usize,
    pub degree_x: u32,
    pub degree_y: u32,
    pub holds: bool,
}

const GRID: usize = 10;
const MARGIN: usize = 3;

/// Checks the identity for every pair of basis vectors.
pub fn wdvv_check(backend: &Backend, tau: &TauVector) -> Result<Vec<WdvvOutcome>> {
    let ring = tau.levels()[0].ring().clone();
    let n = backend.target().rank();
    let g = compute_g(backend, tau, 1)?;
    let pairing = backend.target().pairing();
    let desc = |alpha: usize, k: usize| {
        Insertion::new(1, LaurentQ::monomial(k as i32, KVector::basis(&ring, n, alpha, Series::one(&ring))))
    };
    // one-variable series <<phi_c L^k, phi_a>>, fitted the same way
    let mut single: Vec<Vec<Vec<Series>>> = Vec::new(); // [c][a] -> newton coefficients
    for c in 0..n {
        let mut per_a = Vec::new();
        for a in 0..n {
            let seq: Vec<Series> = (0..GRID)
                .map(|k| backend.double_bracket(0, &[desc(c, k), basis_insertion(&ring, n, 1, a)], tau, 1))
                .collect::<Result<_>>()?;
            per_a.push(newton_2d(&[seq]).into_iter().next().expect("one row"));
        }
        single.push(per_a);
    }
    let degree = |coeffs: &[Series]| -> Result<u32> {
        let d = coeffs.iter().rposition(|s| !s.is_zero()).unwrap_or(0);
        if d + 1 + MARGIN > coeffs.len() {
            return Err(Error::ResummationUnstable(coeffs.len()));
        }
        Ok(d as u32)
    };
    let one_var = |coeffs: &[Series], deg: u32, second: bool| -> Poly2 {
        // sum_a F_a x^a (1 - x)^{deg - a}
        let mut out = Poly2::new();
        for (a, f) in coeffs.iter().enumerate().take(deg as usize + 1) {
            if f.is_zero() {
                continue;
            }
            let key = if second { (0, a as u32) } else { (a as u32, 0) };
            let mono = Poly2::from([(key, f.clone())]);
            p_add(&mut out, &p_mul(&mono, &one_minus_pow(&ring, deg - a as u32, second)));
        }
        out
    };

    let mut outcomes = Vec::new();
    for phi in 0..n {
        for psi in 0..n {
            let grid: Vec<Vec<Series>> = (0..GRID)
                .map(|k| {
                    (0..GRID)
                        .map(|m| backend.double_bracket(0, &[desc(phi, k), desc(psi, m)], tau, 1))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            let e = newton_2d(&grid);
            let mut da = 0;
            let mut db = 0;
            for (a, row) in e.iter().enumerate() {
                for (b, v) in row.iter().enumerate() {
                    if !v.is_zero() {
                        da = da.max(a);
                        db = db.max(b);
                    }
                }
            }
            if da + 1 + MARGIN > GRID || db + 1 + MARGIN > GRID {
                return Err(Error::ResummationUnstable(GRID));
            }
            let mut dx = da as u32;
            let mut dy = db as u32;
            for a in 0..n {
                dx = dx.max(degree(&single[phi][a])?);
                dy = dy.max(degree(&single[psi][a])?);
            }
            let den_x = one_minus_pow(&ring, dx + 1, false);
            let den_y = one_minus_pow(&ring, dy + 1, true);

            // left side times the denominators
            let mut lhs = p_scale(&p_mul(&den_x, &den_y), &Series::constant(&ring, pairing[phi][psi].clone()));
            let mut bracket = Poly2::new();
            for (a, row) in e.iter().enumerate() {
                for (b, v) in row.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    let mono = Poly2::from([((a as u32, b as u32), v.clone())]);
                    let t = p_mul(
                        &p_mul(&mono, &one_minus_pow(&ring, dx - a as u32, false)),
                        &one_minus_pow(&ring, dy - b as u32, true),
                    );
                    p_add(&mut bracket, &t);
                }
            }
            let mut one_minus_xy = Poly2::from([((0, 0), Series::one(&ring))]);
            p_add(&mut one_minus_xy, &Poly2::from([((1, 1), Series::from_int(&ring, -1))]));
            p_add(&mut lhs, &p_mul(&one_minus_xy, &bracket));

            // right side times the denominators
            let mut rhs = Poly2::new();
            for a in 0..n {
                let mut left = p_scale(&den_x, &Series::constant(&ring, pairing[phi][a].clone()));
                p_add(&mut left, &one_var(&single[phi][a], dx, false));
                for b in 0..n {
                    let gab = &g.inverse[a][b];
                    if gab.is_zero() {
                        continue;
                    }
                    let mut right = p_scale(&den_y, &Series::constant(&ring, pairing[b][psi].clone()));
                    // <<phi_b, psi/(1 - yL)>> = <<psi L^m, phi_b>> by symmetry
                    p_add(&mut right, &one_var(&single[psi][b], dy, true));
                    p_add(&mut rhs, &p_scale(&p_mul(&left, &right), gab));
                }
            }
            outcomes.push(WdvvOutcome {
                phi,
                psi,
                degree_x: dx,
                degree_y: dy,
                holds: lhs == rhs,
            });
        }
    }
    backend.take_missing()?;
    Ok(outcomes)
}
