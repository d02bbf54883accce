//! Closed-form super-trace constants of the symmetric fixed loci, plus the
//! counting identities used to redistribute them between cases.

use num::{BigInt, BigRational, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Which family of fixed-locus constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Two-cycle loci with bundle `(L1 L2 - 1)^2`.
    TwoA,
    /// Two-cycle loci with bundle `(L5 L6 - 1)^2`; defined from one 2-cycle on.
    TwoC,
    /// Single `r`-cycle loci, `r` in {3, 4, 6}.
    Cyclic(u32),
}

fn factorial(n: u32) -> BigRational {
    BigRational::from_integer(crate::correlators::factorial(n))
}

fn pow(base: u32, e: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(base).pow(e))
}

/// `(1/4) 2^l (l+1)!`.
pub fn constant_2a(l: u32) -> BigRational {
    pow(2, l) * factorial(l + 1) / BigRational::from_integer(4.into())
}

/// Same closed form as [`constant_2a`], only meaningful for `l >= 1`.
pub fn constant_2c(l: u32) -> Result<BigRational> {
    if l == 0 {
        return Err(Error::Unsupported(
            "constant_2c requires at least one 2-cycle".into(),
        ));
    }
    Ok(constant_2a(l))
}

/// `r^l l!` for `r` in {3, 4, 6}.
pub fn constant_cyclic(r: u32, l: u32) -> Result<BigRational> {
    if !matches!(r, 3 | 4 | 6) {
        return Err(Error::Unsupported(format!(
            "cyclic constant for r = {r}; expected 3, 4 or 6"
        )));
    }
    Ok(pow(r, l) * factorial(l))
}

/// Evaluate a family at `l`.
pub fn constant(family: Family, l: u32) -> Result<BigRational> {
    match family {
        Family::TwoA => Ok(constant_2a(l)),
        Family::TwoC => constant_2c(l),
        Family::Cyclic(r) => constant_cyclic(r, l),
    }
}

/// One checked identity instance.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityRow {
    pub identity: &'static str,
    pub l: u32,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecursionReport {
    pub family: Family,
    pub l_max: u32,
    pub rows: Vec<IdentityRow>,
    pub all_hold: bool,
}

fn row(identity: &'static str, l: u32, lhs: BigRational, rhs: BigRational) -> IdentityRow {
    IdentityRow {
        identity,
        l,
        holds: lhs == rhs,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

/// Sum over splittings `l = l' + (l - l')` of `C(l, l') l'! (l-l')!`.
pub fn configuration_count(l: u32) -> BigRational {
    (0..=l).fold(BigRational::zero(), |acc, k| {
        acc + crate::ring::binomial(i64::from(l), k) * factorial(k) * factorial(l - k)
    })
}

/// Check the configuration count, the curve count and the one-step dilaton
/// ratio of `family` for `l <= l_max`.
pub fn verify_dilaton_recursion(family: Family, l_max: u32) -> Result<RecursionReport> {
    constant(family, 1)?;
    let mut rows = Vec::new();
    let int = |n: u32| BigRational::from_integer(BigInt::from(n));
    for l in 0..=l_max {
        rows.push(row("configuration_count", l, configuration_count(l), factorial(l + 1)));
        rows.push(row(
            "curve_count",
            l,
            factorial(l + 1),
            factorial(l + 2) - int(l + 1) * factorial(l + 1),
        ));
        let start = if family == Family::TwoC { 1 } else { 0 };
        if l >= start && l < l_max {
            let ratio = constant(family, l + 1)? / constant(family, l)?;
            let expected = match family {
                Family::TwoA | Family::TwoC => int(2 * (l + 2)),
                Family::Cyclic(r) => int(r * (l + 1)),
            };
            rows.push(row("dilaton_step_ratio", l, ratio, expected));
        }
    }
    let all_hold = rows.iter().all(|r| r.holds);
    Ok(RecursionReport {
        family,
        l_max,
        rows,
        all_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn printed_values() {
        assert_eq!(constant_2a(0), q(1, 4));
        assert_eq!(constant_2a(1), q(1, 1));
        assert_eq!(constant_2a(3), q(48, 1));
        assert_eq!(constant_2c(1).unwrap(), q(1, 1));
        assert_eq!(constant_2c(2).unwrap(), q(6, 1));
        assert!(constant_2c(0).is_err());
        assert_eq!(constant_cyclic(3, 2).unwrap(), q(18, 1));
        assert_eq!(constant_cyclic(6, 0).unwrap(), q(1, 1));
        assert_eq!(constant_cyclic(4, 1).unwrap(), q(4, 1));
        assert!(constant_cyclic(5, 1).is_err());
    }

    #[test]
    fn identity_examples() {
        assert_eq!(configuration_count(2), q(6, 1));
        let rep = verify_dilaton_recursion(Family::TwoA, 8).unwrap();
        assert!(rep.all_hold);
        let step0 = rep
            .rows
            .iter()
            .find(|r| r.identity == "dilaton_step_ratio" && r.l == 0)
            .unwrap();
        assert_eq!(step0.lhs, "4");
        let curve1 = rep
            .rows
            .iter()
            .find(|r| r.identity == "curve_count" && r.l == 1)
            .unwrap();
        assert_eq!(curve1.rhs, "2");
    }

    #[test]
    fn every_family_passes() {
        for fam in [
            Family::TwoA,
            Family::TwoC,
            Family::Cyclic(3),
            Family::Cyclic(4),
            Family::Cyclic(6),
        ] {
            assert!(verify_dilaton_recursion(fam, 8).unwrap().all_hold, "{fam:?}");
        }
        assert!(verify_dilaton_recursion(Family::Cyclic(5), 8).is_err());
    }
}
