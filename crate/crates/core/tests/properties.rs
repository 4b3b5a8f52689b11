use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wn2_core::commutant::skew_table;
use wn2_core::fock::{self, Oracle};
use wn2_core::ope::{self, circle, ope_singular, wick};
use wn2_core::syntax::{parse, render, FreeResolver};
use wn2_core::{FieldExpr, Rational, Symbol};

fn symbols(n: u8) -> Vec<Symbol> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            out.extend([Symbol::beta(i, j), Symbol::gamma(i, j), Symbol::b(i, j), Symbol::c(i, j)]);
        }
    }
    out
}

/// A scaled monomial of one to three factors; parity is homogeneous.
fn monomial() -> impl Strategy<Value = FieldExpr> {
    let factor = (0usize..16, 0u32..2).prop_map(|(s, k)| FieldExpr::generator(symbols(2)[s]).nth_derivative(k));
    (proptest::collection::vec(factor, 1..4), -4i64..=4, 1i64..=3).prop_map(|(fs, num, den)| {
        let num = if num == 0 { 1 } else { num };
        ope::normal_order(&fs).scale(&Rational::new(num, den))
    })
}

fn expression() -> impl Strategy<Value = FieldExpr> {
    proptest::collection::vec(monomial(), 1..4).prop_map(|ms| {
        let mut out = FieldExpr::zero();
        for m in &ms {
            out += m;
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_round_trips(e in expression()) {
        let r = FreeResolver { rank: 2 };
        prop_assert_eq!(parse(&render(&e), &r).unwrap(), e);
    }

    #[test]
    fn skew_symmetry(a in monomial(), b in monomial()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let both_odd = a.parity() == Some(true) && b.parity() == Some(true);
        prop_assert_eq!(ope_singular(&b, &a), skew_table(&ope_singular(&a, &b), both_odd));
    }

    #[test]
    fn translation_covariance(a in expression(), b in expression(), n in -3i64..4) {
        prop_assert_eq!(circle(&a.derivative(), &b, n), circle(&a, &b, n - 1).scale(&Rational::from_int(-n)));
        prop_assert_eq!(
            circle(&a, &b.derivative(), n),
            &circle(&a, &b, n).derivative() + &circle(&a, &b, n - 1).scale(&Rational::from_int(n)),
        );
    }

    #[test]
    fn products_agree_with_mode_calculus(a in expression(), b in expression(), n in -3i64..4) {
        let mut oracle = Oracle::new(Rational::from_int(12));
        prop_assert!(oracle.agree(&a, &b, n).unwrap());
    }

    #[test]
    fn sampled_reports_are_deterministic(seed in any::<u64>()) {
        let s = symbols(2);
        let one = fock::compare_random(&s, 5, &Rational::from_int(2), &Rational::from_int(7), seed, (-2, 2)).unwrap();
        let two = fock::compare_random(&s, 5, &Rational::from_int(2), &Rational::from_int(7), seed, (-2, 2)).unwrap();
        prop_assert!(one.pass());
        prop_assert_eq!(one, two);
    }
}

#[test]
fn sampled_fields_are_composite_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let e = fock::random_composite(&mut rng, &symbols(2), 6);
        assert!(e.terms().all(|(m, _)| m.len() >= 2 && m.weight() <= Rational::from_int(3)));
    }
}

#[test]
fn normal_order_is_right_nested_wick() {
    let x = FieldExpr::generator(Symbol::beta(1, 2));
    let y = FieldExpr::generator(Symbol::gamma(1, 2)).derivative();
    let z = FieldExpr::generator(Symbol::c(2, 1));
    assert_eq!(ope::normal_order(&[x.clone(), y.clone(), z.clone()]), wick(&x, &wick(&y, &z)));
}
