//! Randomized property tests: series ring axioms, dissection and
//! huffing identities, backend agreement, and parser round trips.

use proptest::prelude::*;

use qseries::expr::{eval, eval_exact, eval_mod};
use qseries::parse_expr;
use qseries::ring::Exact;
use qseries::series::QSeries;
use qseries::special::ThetaArg;
use qseries::Expr;

fn arb_series() -> impl Strategy<Value = QSeries<Exact>> {
    (-6i64..6, prop::collection::vec(-9i64..10, 1..14))
        .prop_map(|(val, coeffs)| QSeries::from_i64_coeffs(Exact, val, &coeffs))
}

/// Series with a unit leading coefficient, for inversion laws.
fn arb_unit_series() -> impl Strategy<Value = QSeries<Exact>> {
    (
        -4i64..4,
        prop_oneof![Just(1i64), Just(-1i64)],
        prop::collection::vec(-9i64..10, 1..12),
    )
        .prop_map(|(val, lead, tail)| {
            let mut coeffs = vec![lead];
            coeffs.extend(tail);
            QSeries::from_i64_coeffs(Exact, val, &coeffs)
        })
}

fn common(a: &QSeries<Exact>, b: &QSeries<Exact>) -> i64 {
    a.order().min(b.order())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mul_commutes(a in arb_series(), b in arb_series()) {
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        prop_assert!(ab.eq_to_order(&ba, common(&ab, &ba)).unwrap());
    }

    #[test]
    fn mul_associates(a in arb_series(), b in arb_series(), c in arb_series()) {
        let l = a.mul(&b).mul(&c);
        let r = a.mul(&b.mul(&c));
        prop_assert!(l.eq_to_order(&r, common(&l, &r)).unwrap());
    }

    #[test]
    fn mul_distributes(a in arb_series(), b in arb_series(), c in arb_series()) {
        let l = a.mul(&b.add(&c));
        let r = a.mul(&b).add(&a.mul(&c));
        prop_assert!(l.eq_to_order(&r, common(&l, &r)).unwrap());
    }

    #[test]
    fn add_commutes_and_sub_cancels(a in arb_series(), b in arb_series()) {
        let s1 = a.add(&b);
        let s2 = b.add(&a);
        prop_assert!(s1.eq_to_order(&s2, common(&s1, &s2)).unwrap());
        let z = a.sub(&a);
        prop_assert!(z.is_zero());
    }

    #[test]
    fn inverse_is_right_inverse(a in arb_unit_series()) {
        let inv = a.invert().unwrap();
        let prod = a.mul(&inv);
        let one = QSeries::one(Exact, prod.order());
        prop_assert!(prod.eq_to_order(&one, prod.order()).unwrap());
    }

    #[test]
    fn dissection_reconstructs(a in arb_series(), m in 1i64..=8) {
        let mut sum: Option<QSeries<Exact>> = None;
        for j in 0..m {
            let piece = a.extract_ap(m, j).subst_power(m).shift_exp(j);
            sum = Some(match sum {
                Some(s) => s.add(&piece),
                None => piece,
            });
        }
        let sum = sum.unwrap();
        prop_assert!(sum.eq_to_order(&a, common(&sum, &a)).unwrap());
    }

    #[test]
    fn huff_is_subst_of_extract(a in arb_series(), k in 1i64..=8) {
        let lhs = a.huff(k);
        let rhs = a.extract_ap(k, 0).subst_power(k);
        prop_assert!(lhs.eq_to_order(&rhs, common(&lhs, &rhs)).unwrap());
    }

    #[test]
    fn negate_q_parity(a in arb_series()) {
        let even = a.negate_q().extract_ap(2, 0);
        prop_assert!(even.eq_to_order(&a.extract_ap(2, 0), even.order()).unwrap());
        let odd = a.negate_q().extract_ap(2, 1);
        prop_assert!(odd.eq_to_order(&a.extract_ap(2, 1).neg(), odd.order()).unwrap());
    }

    #[test]
    fn modular_backend_matches_reduced_exact(a in arb_series(), b in arb_series(), m in 2u64..600) {
        let exact = a.mul(&b).reduce_mod(m);
        let modular = a.reduce_mod(m).mul(&b.reduce_mod(m));
        let upto = exact.order().min(modular.order());
        prop_assert!(exact.eq_to_order(&modular, upto).unwrap());
    }
}

// Random expression trees for evaluator and printer laws ------------------

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..20).prop_map(Expr::Int),
        Just(Expr::Q),
        (1i64..12).prop_map(Expr::EtaF),
        (prop_oneof![Just(1i8), Just(-1i8)], 1i64..6).prop_map(|(sign, k)| Expr::Phi { sign, k }),
        (1i64..5).prop_map(|k| Expr::Psi { k }),
        (1i64..4).prop_map(|k| Expr::Lam { k }),
        (
            (1i64..6),
            (1i64..6),
            prop_oneof![Just(1i8), Just(-1i8)],
            prop_oneof![Just(1i8), Just(-1i8)]
        )
            .prop_map(|(e1, e2, s1, s2)| Expr::Theta {
                a: ThetaArg::new(s1, e1),
                b: ThetaArg::new(s2, e2),
            }),
    ];
    leaf.prop_recursive(3, 24, 8, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(b)),
            (inner.clone(), 0i64..4).prop_map(|(a, k)| a.pow(k)),
            inner.clone().prop_map(|a| a.neg()),
            inner.clone().prop_map(|a| Expr::NegQ(Box::new(a))),
            (inner.clone(), 1i64..5).prop_map(|(a, k)| Expr::Huff {
                k,
                inner: Box::new(a)
            }),
            (inner.clone(), 1i64..5).prop_map(|(a, k)| Expr::SubstPow {
                k,
                inner: Box::new(a)
            }),
            (inner.clone(), 2i64..5).prop_map(|(a, m)| Expr::ExtractAp {
                m,
                j: m - 1,
                inner: Box::new(a),
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// parse(print(ast)) == ast for machine-built trees.
    #[test]
    fn printer_parser_round_trip(e in arb_expr()) {
        let printed = e.to_string();
        let reparsed = parse_expr(&printed);
        prop_assert!(reparsed.is_ok(), "printed {:?}: {:?}", printed, reparsed);
        prop_assert_eq!(reparsed.unwrap(), e, "through {:?}", printed);
    }

    /// Exact evaluation reduced mod m equals modular evaluation, over
    /// whole expression trees (division-free by construction).
    #[test]
    fn eval_backends_agree(e in arb_expr(), m in 2u64..400) {
        let exact = eval_exact(&e, 40).unwrap();
        let modular = eval_mod(&e, 40, m).unwrap();
        prop_assert!(exact.reduce_mod(m).eq_to_order(&modular, 40).unwrap());
    }

    /// The evaluator always reaches the requested order.
    #[test]
    fn eval_reaches_requested_order(e in arb_expr(), order in 1i64..60) {
        let s = eval(&e, order, &Exact).unwrap();
        prop_assert!(s.order() >= order);
    }
}
