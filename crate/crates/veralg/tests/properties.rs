//! Randomized property tests for the exact-arithmetic core: field laws,
//! normal-form linearity and idempotence, expression round-trips, and the
//! group laws of the parameter-level composition.

use proptest::prelude::*;

use veralg::autgroup::{
    compose, invert, params_to_wordsystem, ParamsKind, StronglyStableParams,
};
use veralg::exactfield::{FieldAutomorphism, FieldElement, FieldSpec};
use veralg::exprio::{format_expression, parse_expression};
use veralg::freemagma::enumerate_monomials;
use veralg::relfree::Variety;
use veralg::verbal::Elem;

fn rational() -> impl Strategy<Value = FieldElement> {
    (-6i64..=6, 1i64..=3).prop_map(|(p, q)| FieldElement::ratio(p, q))
}

fn quadratic_element() -> impl Strategy<Value = FieldElement> {
    (rational(), rational())
        .prop_map(|(a, b)| a.add(&b.mul(&FieldElement::sqrt_d(2))))
}

/// A concrete 2-generator element of degree at most 3 with small
/// coefficients.
fn small_element() -> impl Strategy<Value = Elem> {
    let monos: Vec<_> = (1u32..=3)
        .flat_map(|d| enumerate_monomials(2, d))
        .collect();
    let n = monos.len();
    prop::collection::vec((0..n, rational()), 0..6).prop_map(move |picks| {
        let mut e = Elem::zero(2);
        for (i, c) in picks {
            e = e.add(&Elem::term(c, &monos[i], 2));
        }
        e
    })
}

fn nilp3_params() -> impl Strategy<Value = StronglyStableParams> {
    let field = FieldSpec::quadratic(2).unwrap();
    (rational(), rational(), rational(), prop::bool::ANY).prop_filter_map(
        "alpha12 != ±alpha21",
        move |(g, a12, a21, conj)| {
            let p = StronglyStableParams {
                variety: Variety::nilpotent(3),
                field,
                phi: if conj {
                    FieldAutomorphism::Conjugation
                } else {
                    FieldAutomorphism::Identity
                },
                kind: ParamsKind::Nilp3 {
                    gamma12: g,
                    alpha12: a12,
                    alpha21: a21,
                },
            };
            p.validate().is_ok().then_some(p)
        },
    )
}

proptest! {
    #[test]
    fn field_ring_laws(a in quadratic_element(), b in quadratic_element(), c in quadratic_element()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        if !a.is_zero() {
            prop_assert_eq!(a.mul(&a.inv().unwrap()), FieldElement::one());
        }
    }

    #[test]
    fn field_automorphism_laws(a in quadratic_element(), b in quadratic_element()) {
        let phi = FieldAutomorphism::Conjugation;
        prop_assert_eq!(phi.apply(&a.add(&b)), phi.apply(&a).add(&phi.apply(&b)));
        prop_assert_eq!(phi.apply(&a.mul(&b)), phi.apply(&a).mul(&phi.apply(&b)));
        prop_assert_eq!(phi.apply(&phi.apply(&a)), a);
    }

    #[test]
    fn normal_form_is_linear_and_idempotent(e1 in small_element(), e2 in small_element()) {
        for variety in [
            Variety::nilpotent(3),
            Variety::commutative(),
            Variety::anticommutative(Vec::new()),
            Variety::jordan(),
        ] {
            let nf = |e: &Elem| variety.normal_form(e).unwrap();
            let n1 = nf(&e1);
            prop_assert_eq!(nf(&n1), n1.clone());
            prop_assert_eq!(nf(&e1.add(&e2)), n1.add(&nf(&e2)));
        }
    }

    #[test]
    fn expression_text_round_trip(e in small_element()) {
        let text = format_expression(&e);
        let parsed = parse_expression(&text, 2, &FieldSpec::Rationals).unwrap();
        prop_assert_eq!(parsed.element, e);
    }

    #[test]
    fn composition_group_laws(p in nilp3_params(), q in nilp3_params()) {
        let id = StronglyStableParams::identity(p.variety.clone(), p.field);
        prop_assert_eq!(compose(&p, &id).unwrap(), p.clone());
        prop_assert_eq!(compose(&id, &p).unwrap(), p.clone());
        let p_inv = invert(&p).unwrap();
        prop_assert_eq!(compose(&p_inv, &p).unwrap(), id.clone());
        prop_assert_eq!(compose(&p, &p_inv).unwrap(), id);
        // Composition matches the variety: both orders stay in the family.
        let _ = params_to_wordsystem(&compose(&q, &p).unwrap()).unwrap();
        let _ = params_to_wordsystem(&compose(&p, &q).unwrap()).unwrap();
    }

    #[test]
    fn scaled_factor_decomposition(p in nilp3_params()) {
        // Every tuple factors as (additive-correction part) ∘ (scaling part),
        // with the scaling part applied first.
        let ParamsKind::Nilp3 { gamma12, alpha12, alpha21 } = p.kind.clone() else {
            unreachable!()
        };
        let g_factor = StronglyStableParams {
            variety: p.variety.clone(),
            field: p.field,
            phi: FieldAutomorphism::Identity,
            kind: ParamsKind::Nilp3 {
                gamma12,
                alpha12: FieldElement::one(),
                alpha21: FieldElement::zero(),
            },
        };
        let a_factor = StronglyStableParams {
            variety: p.variety.clone(),
            field: p.field,
            phi: p.phi,
            kind: ParamsKind::Nilp3 {
                gamma12: FieldElement::zero(),
                alpha12,
                alpha21,
            },
        };
        prop_assert_eq!(compose(&g_factor, &a_factor).unwrap(), p);
    }
}
