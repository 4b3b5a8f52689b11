use proptest::prelude::*;
use wn2_core::kernel::linalg;
use wn2_core::ope;
use wn2_core::zhu::*;
use wn2_core::{FieldExpr, Rational, Symbol};

fn poly(text: &str) -> Poly {
    parse_poly(text).expect("valid polynomial")
}

fn r(v: i64) -> Rational {
    Rational::from_int(v)
}

#[test]
fn relation_polynomials_rank_three_and_four() {
    let (p, q) = compute_pq(3, ZhuGrading::Integral).unwrap();
    assert_eq!(p, poly("-1/27*c3 + 1/6*c2*c1 - 1/27*c1^3 + 3/2*c2 - 2/3*c1^2 - 11/3*c1 - 6"));
    assert_eq!(q, poly("-1/27*c3 + 1/6*c2*c1 - 1/27*c1^3 + c2 - 1/3*c1^2 - 2/3*c1"));
    let inv = invariants(4, ZhuGrading::Integral).unwrap();
    let (p, q) = compute_pq_from(&inv).unwrap();
    assert_eq!(
        p,
        poly(
            "-1/256*c4 + 1/32*c1*c3 + 1/32*c2*c1^2 - 1/256*c1^4 + 1/2*c3 + 7/8*c2*c1 - 5/32*c1^3 + 6*c2 \
             - 35/16*c1^2 - 25/2*c1 - 24"
        )
    );
    assert_eq!(
        q,
        poly(
            "-1/256*c4 + 1/32*c1*c3 + 1/32*c2*c1^2 - 1/256*c1^4 + 3/8*c3 + 5/8*c1*c2 - 3/32*c1^3 + 3*c2 \
             - 11/16*c1^2 - 3/2*c1"
        )
    );
    assert!(leading_symbol_check(&inv, &p, &q));
}

#[test]
fn symmetric_grading_gives_other_relations() {
    let (p, _) = compute_pq(2, ZhuGrading::Symmetric).unwrap();
    assert_ne!(p, poly("1/2*c2 - 1/4*c1^2 - 3/2*c1 - 2"));
}

#[test]
fn relations_shift_by_n() {
    // d c_1 = (c_1 + n) d forces P(c_1) = Q(c_1 + n).
    for n in 2..=3u8 {
        let (p, q) = compute_pq(n, ZhuGrading::Integral).unwrap();
        let shifted = q.substitute(c(1), &(&Poly::var(c(1)) + &Poly::int(n as i64)));
        assert_eq!(p, shifted);
    }
}

#[test]
fn unsupported_rank() {
    assert_eq!(compute_pq(5, ZhuGrading::Integral), Err(ZhuError::Unsupported(5)));
}

#[test]
fn rank_three_family_and_exclusions() {
    let fam = classify_family(3).unwrap();
    let l2 = poly("22 + 8*a + 2/3*a^2 - 12*m - 2*a*m + 2*m^2");
    let l3 = &poly("9 + a") * &poly("81 + 27*a + 2*a^2 - 54*m - 9*a*m + 9*m^2");
    assert_eq!(fam.solved_value(c(2)), Some(&l2));
    assert_eq!(fam.solved_value(c(3)), Some(&l3));
    assert_eq!(fam.free, vec![A]);
    let triples = [
        (2, "-7 + 2*m", "-4/3 - 2/3*m + 2/3*m^2", "-20 - 6*m + 12*m^2 - 2*m^3"),
        (3, "-8 + 2*m", "2/3 - 4/3*m + 2/3*m^2", "-7 - 6*m + 15*m^2 - 2*m^3"),
    ];
    for (i, a, l2, l3) in triples {
        let point = fam.exclusion_at(i).point.expect("isolated exclusion");
        assert_eq!(point, vec![(A, poly(a)), (c(2), poly(l2)), (c(3), poly(l3))], "i = {i}");
    }
}

#[test]
fn rank_four_family() {
    let fam = classify_family(4).unwrap();
    let l3 = poly(
        "400 + 140*a + 15*a^2 + 1/2*a^3 - 28*l2 - 2*a*l2 - 280*m - 60*a*m - 3*a^2*m + 4*l2*m + 80*m^2 \
         + 8*a*m^2 - 8*m^3",
    );
    let l4 = &(&poly("16 + a") * &poly("16 + a - 4*m")) * &poly("176 + 48*a + 3*a^2 - 8*l2 - 96*m - 12*a*m + 16*m^2");
    assert_eq!(fam.solved_value(c(3)), Some(&l3));
    assert_eq!(fam.solved_value(c(4)), Some(&l4));
    assert_eq!(fam.free, vec![A, c(2)]);
}

#[test]
fn sl2_modules_up_to_ten() {
    let fam = classify_family(2).unwrap();
    for m in 1..=10u32 {
        let at = fam.at_dim(m);
        let (a, lambda) = at.instantiate(&Default::default()).unwrap();
        assert_eq!(a, r(m as i64 - 3));
        assert_eq!(lambda, vec![Rational::new((m * m) as i64 - 1, 2)]);
        let report = verma_action(2, m as usize, a.clone(), lambda.clone(), &vec![Letter::D; m as usize]).unwrap();
        assert!(report.irreducible(), "m = {m}");
        assert!(report.matrix.iter().flatten().all(Rational::is_zero));
        assert!(report.dd_scalars.iter().all(|s| !s.is_zero()));
        let module = VermaModule::new(2, m as usize, a, lambda).unwrap();
        assert!(module.relations_hold());
        // (d')^{m-1} d^{m-1} v is a nonzero multiple of v.
        let k = m as usize - 1;
        let mut word = vec![Letter::DPrime; k];
        word.extend(vec![Letter::D; k]);
        assert!(!module.word(&word).unwrap()[0][0].is_zero());
    }
    let text = fam.at_dim(3).to_string();
    assert!(text.contains("a = 0") && text.contains("l2 = 4"), "{text}");
}

#[test]
fn rank_three_module_from_family() {
    let fam = classify_family(3).unwrap().at_dim(3);
    let free = [(A, r(5))].into_iter().collect();
    let (a, lambda) = fam.instantiate(&free).unwrap();
    let module = VermaModule::new(3, 3, a.clone(), lambda.clone()).unwrap();
    assert!(module.relations_hold());
    assert!(verma_action(3, 3, a, lambda, &[]).unwrap().irreducible());
    // a = 2m - 7 lies on the i = 2 exclusion.
    let free = [(A, r(-1))].into_iter().collect();
    let (a, lambda) = fam.instantiate(&free).unwrap();
    let report = verma_action(3, 3, a, lambda, &[]).unwrap();
    assert_eq!(report.violated, vec![2]);
    assert!(!report.irreducible());
}

fn cofactor_det(m: &[Vec<Rational>]) -> Rational {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut out = Rational::zero();
    for (j, head) in m[0].iter().enumerate() {
        let minor: Vec<Vec<Rational>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
        let t = head * &cofactor_det(&minor);
        if j % 2 == 0 {
            out += &t;
        } else {
            out -= &t;
        }
    }
    out
}

fn power_sums(m: &[Vec<Rational>]) -> Vec<Rational> {
    let size = m.len();
    let mut power = m.to_vec();
    let mut out = Vec::new();
    for step in 0..size {
        if step > 0 {
            power = mat_mul(&power, &m.to_vec());
        }
        out.push((0..size).map(|i| power[i][i].clone()).sum());
    }
    out
}

fn int_matrix() -> impl Strategy<Value = Vec<Vec<Rational>>> {
    (2usize..=5).prop_flat_map(|s| {
        proptest::collection::vec(proptest::collection::vec((-9i64..=9).prop_map(Rational::from_int), s), s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn newton_girard_is_determinant(m in int_matrix()) {
        let det = cofactor_det(&m);
        prop_assert_eq!(newton_girard(&power_sums(&m)), det.clone());
        prop_assert_eq!(linalg::determinant(&m), det);
    }
}

#[test]
fn literal_sign_convention_fails() {
    let m = vec![vec![r(1), r(2)], vec![r(3), r(4)]];
    assert_ne!(newton_girard_literal(&power_sums(&m)), cofactor_det(&m));
}

fn weyl_element() -> impl Strategy<Value = WeylElement> {
    let letter = (0u8..2, 1u8..=2, 1u8..=2).prop_map(|(kind, i, j)| match kind {
        0 => WeylElement::x(2, i, j),
        _ => WeylElement::d(2, i, j),
    });
    let monomial = (proptest::collection::vec(letter, 0..4), -3i64..=3)
        .prop_map(|(ls, k)| ls.iter().fold(WeylElement::scalar(2, Rational::from_int(k)), |acc, l| acc.mul(l)));
    proptest::collection::vec(monomial, 1..3).prop_map(|ms| {
        let mut out = WeylElement::zero(2);
        for m in &ms {
            out.add_scaled(m, &Rational::one());
        }
        out
    })
}

/// A single normally ordered `beta gamma` monomial for `n = 2`.
fn bg_monomial() -> impl Strategy<Value = FieldExpr> {
    let factor = (any::<bool>(), 1u8..=2, 1u8..=2, 0u32..2).prop_map(|(b, i, j, k)| {
        let s = if b { Symbol::beta(i, j) } else { Symbol::gamma(i, j) };
        FieldExpr::generator(s).nth_derivative(k)
    });
    proptest::collection::vec(factor, 1..3).prop_map(|fs| ope::normal_order(&fs))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn weyl_product_is_associative(a in weyl_element(), b in weyl_element(), c in weyl_element()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn zhu_map_is_multiplicative(a in bg_monomial(), b in bg_monomial(), symmetric in any::<bool>()) {
        let g = if symmetric { ZhuGrading::Symmetric } else { ZhuGrading::Integral };
        let mut z = ZhuProjector::new(2, g);
        let star = zhu_star(g, &a, &b).unwrap();
        prop_assert_eq!(z.project(&star).unwrap(), z.project(&a).unwrap().mul(&z.project(&b).unwrap()));
    }
}
