//! Property tests for the expression core and the structures on top of it.

use proptest::prelude::*;

use jetcalc::expr::equiv::{equivalent, EquivOptions};
use jetcalc::expr::{
    differentiate, evaluate, expand, parse_expr, Assignment, Expr, JetVar, MultiIndex, Var,
};
use jetcalc::jet::{prolong, seely_merge, seely_split, total_derivative, Chart, Section};

const N: usize = 2;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-6i64..=6).prop_map(Expr::int),
        ((-6i64..=6), (1i64..=4)).prop_map(|(p, q)| Expr::rational(p, q)),
        (0usize..N).prop_map(Expr::base),
        (0usize..2, 0u32..=2, 0u32..=1).prop_map(|(k, a, b)| Expr::jet(k, vec![a, b])),
        Just(Expr::param("eta")),
    ]
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Sum),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::Product),
            (inner.clone(), 1i32..=3).prop_map(|(b, e)| b.pow(e)),
            inner.clone().prop_map(|e| -e),
            inner
                .clone()
                .prop_map(|e| Expr::apply(jetcalc::expr::Func::Sin, e)),
        ]
    })
}

/// Polynomial-only expressions (no transcendental functions): evaluation
/// never hits a domain error, so stronger statements hold.
fn arb_poly() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Sum),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::Product),
            (inner.clone(), 1i32..=3).prop_map(|(b, e)| b.pow(e)),
            inner.prop_map(|e| -e),
        ]
    })
}

fn full_assignment(e: &Expr, seedling: f64) -> Assignment {
    let mut asg = Assignment::new();
    let mut salt = seedling;
    for v in e.free_vars() {
        salt = (salt * 1.7 + 0.31).sin();
        asg.set_var(v, salt);
    }
    asg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn canonicalization_is_idempotent(e in arb_expr()) {
        let c = e.canon();
        prop_assert_eq!(c.canon(), c);
    }

    #[test]
    fn evaluation_commutes_with_canonicalization(e in arb_poly(), seed in 0.0f64..1.0) {
        let asg = full_assignment(&e, seed);
        let raw = evaluate(&e, &asg).unwrap();
        let canon = evaluate(&e.canon(), &asg).unwrap();
        // exact rational folding can differ from float order of operations
        prop_assert!((raw - canon).abs() <= 1e-6 * (1.0 + raw.abs() + canon.abs()));
    }

    #[test]
    fn expansion_preserves_value(e in arb_poly(), seed in 0.0f64..1.0) {
        let asg = full_assignment(&e, seed);
        let raw = evaluate(&e, &asg).unwrap();
        let expanded = evaluate(&expand(&e), &asg).unwrap();
        prop_assert!((raw - expanded).abs() <= 1e-6 * (1.0 + raw.abs() + expanded.abs()));
    }

    #[test]
    fn differentiation_is_linear(e1 in arb_poly(), e2 in arb_poly()) {
        let v = Var::Base(0);
        let combo = (Expr::rational(3, 2) * e1.clone() - Expr::int(2) * e2.clone()).canon();
        let lhs = differentiate(&combo, &v);
        let rhs = (Expr::rational(3, 2) * differentiate(&e1, &v)
            - Expr::int(2) * differentiate(&e2, &v))
        .canon();
        prop_assert!(equivalent(&lhs, &rhs, &EquivOptions::default()).unwrap());
    }

    #[test]
    fn mixed_partials_commute(e in arb_poly()) {
        let (v, w) = (Var::Base(0), Var::Base(1));
        let vw = differentiate(&differentiate(&e, &v), &w);
        let wv = differentiate(&differentiate(&e, &w), &v);
        prop_assert_eq!(expand(&vw), expand(&wv));
    }

    #[test]
    fn total_derivatives_commute_as_polynomials(e in arb_poly()) {
        let d01 = total_derivative(&total_derivative(&e, 0), 1);
        let d10 = total_derivative(&total_derivative(&e, 1), 0);
        prop_assert_eq!(expand(&d01), expand(&d10));
    }

    #[test]
    fn print_parse_roundtrip(e in arb_expr()) {
        let c = e.canon();
        let printed = c.to_string();
        let reparsed = parse_expr(&printed, N).unwrap();
        prop_assert_eq!(reparsed, c, "printed form was `{}`", printed);
    }

    #[test]
    fn prolongation_slots_are_derivatives(coeffs in prop::collection::vec(-3i64..=3, 4)) {
        // s = c0 + c1 x1 + c2 x1 x2 + c3 x2^2
        let s = Section::new(
            Chart::unit_box(2),
            vec![(Expr::int(coeffs[0])
                + Expr::int(coeffs[1]) * Expr::base(0)
                + Expr::int(coeffs[2]) * Expr::base(0) * Expr::base(1)
                + Expr::int(coeffs[3]) * Expr::base(1).pow(2))
            .canon()],
        )
        .unwrap();
        let js = prolong(&s, 2);
        for (jv, e) in &js.assignment {
            if jv.index.order() >= 2 {
                continue;
            }
            for axis in 0..2 {
                let lhs = differentiate(e, &Var::Base(axis));
                let rhs = js
                    .get(&JetVar::new(jv.fiber, jv.index.bump(axis)))
                    .unwrap();
                prop_assert_eq!(&lhs, rhs);
            }
        }
    }

    #[test]
    fn seely_split_merge_inverse(
        c1 in -3i64..=3,
        c2 in -3i64..=3,
        m1 in 1usize..=2,
        r in 0usize..=2,
    ) {
        let chart = Chart::unit_box(1);
        let mut components = vec![(Expr::int(c1) * Expr::base(0).pow(2)).canon()];
        for extra in 0..m1 {
            components.push(
                (Expr::int(c2 + extra as i64) * Expr::base(0)).canon(),
            );
        }
        let s = Section::new(chart, components).unwrap();
        let js = prolong(&s, r);
        let (a, b) = seely_split(&js, m1).unwrap();
        prop_assert_eq!(seely_merge(&a, &b).unwrap(), js);
    }
}

#[test]
fn multiindex_addition_is_commutative_and_graded() {
    let all = MultiIndex::all_up_to(3, 2);
    for a in &all {
        for b in &all {
            assert_eq!(a.add(b), b.add(a));
            assert_eq!(a.add(b).order(), a.order() + b.order());
        }
    }
}
