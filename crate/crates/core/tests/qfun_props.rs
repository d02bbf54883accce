use std::collections::BTreeMap;

use proptest::prelude::*;
use qkrec_core::qfun::{
    d_operator, jet_at_root, laurent_part, subst_inverse_power, total_residue, KVector, LaurentQ, RationalQ,
};
use qkrec_core::ring::{CycloRational, Ring, Series, SeriesRingConfig};

fn ring() -> Ring {
    SeriesRingConfig::new(["e"], false, 2).unwrap()
}

fn laurent() -> impl Strategy<Value = LaurentQ> {
    prop::collection::vec((-3i32..=3, -3i64..=3, -2i64..=2), 0..5).prop_map(|terms| {
        let r = ring();
        let e = Series::var(&r, "e").unwrap();
        let mut out = LaurentQ::zero(&r, 1);
        for (k, c, d) in terms {
            out.add_term(k, &KVector::scalar(&Series::from_int(&r, c) + &e.scale_int(d)));
        }
        out
    })
}

fn poles() -> impl Strategy<Value = BTreeMap<CycloRational, u32>> {
    prop::collection::vec((0i64..12, 1u32..=2), 0..3).prop_map(|ps| {
        let mut den = BTreeMap::new();
        for (k, m) in ps {
            *den.entry(CycloRational::zeta_pow(k)).or_insert(0) += m;
        }
        den
    })
}

fn rational() -> impl Strategy<Value = RationalQ> {
    (laurent(), poles()).prop_map(|(n, d)| RationalQ::new(n, d).unwrap())
}

proptest! {
    #[test]
    fn d_operator_inverts_multiplication_by_q_minus_one(t in laurent()) {
        let one = CycloRational::one();
        let mut back = d_operator(&t).mul_linear(&one);
        back += &LaurentQ::constant(t.eval_at(&one).unwrap());
        prop_assert_eq!(back, t);
    }

    #[test]
    fn laurent_part_is_a_projection(f in rational(), p in laurent()) {
        let lp = laurent_part(&f);
        prop_assert_eq!(laurent_part(&RationalQ::from_laurent(lp.clone())), lp.clone());
        let shifted = &f + &RationalQ::from_laurent(p.clone());
        prop_assert_eq!(laurent_part(&shifted), &lp + &p);
        // what is left has no polynomial part at infinity and no principal part at zero
        let rest = &f - &RationalQ::from_laurent(lp);
        prop_assert!(laurent_part(&rest).is_zero());
    }

    #[test]
    fn global_residue_vanishes(f in rational()) {
        prop_assert!(total_residue(&f).unwrap().is_zero());
    }

    #[test]
    fn global_residue_vanishes_after_substitution(f in rational(), r in 1u32..=3) {
        match subst_inverse_power(&f, r) {
            Ok(g) => prop_assert!(total_residue(&g).unwrap().is_zero()),
            // r-th roots of some pole leave the 12th roots of unity
            Err(e) => prop_assert!(matches!(e, qkrec_core::Error::UnrepresentablePole(_))),
        }
    }

    #[test]
    fn inverse_substitution_is_an_involution(f in rational()) {
        let g = subst_inverse_power(&subst_inverse_power(&f, 1).unwrap(), 1).unwrap();
        prop_assert!((&g - &f).is_zero());
    }

    #[test]
    fn jet_matches_value_and_derivative(t in laurent(), k in 0i64..12) {
        // d/ds t(z (1 + s)) at s = 0 is z t'(z) = sum_k k c_k z^k
        let z = CycloRational::zeta_pow(k);
        let jet = jet_at_root(&RationalQ::from_laurent(t.clone()), &z).unwrap();
        prop_assert_eq!(&jet.value, &t.eval_at(&z).unwrap());
        let mut euler = LaurentQ::zero(t.ring(), 1);
        for (e, c) in t.terms() {
            euler.add_term(e, &c.scale(&Series::from_int(t.ring(), i64::from(e))));
        }
        prop_assert_eq!(jet.derivative, euler.eval_at(&z).unwrap());
    }

    #[test]
    fn rational_value_matches_partial_evaluation(n in laurent(), k in 1i64..12) {
        // (q - z)^{-1} n(q) evaluated away from the pole
        let z = CycloRational::zeta_pow(k);
        let f = RationalQ::with_pole(n.clone(), z.clone(), 1).unwrap();
        let one = CycloRational::one();
        let expected = n.eval_at(&one).unwrap().scale(&Series::constant(n.ring(), (&one - &z).inverse().unwrap()));
        prop_assert_eq!(f.eval_at(&one).unwrap(), expected);
    }
}
