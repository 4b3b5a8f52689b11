//! Circle products of free-field expressions.
//!
//! For normally ordered monomials `A = :a_1 ... a_p:` and `B = :b_1 ... b_q:`
//! in free generators, the full product is a finite sum over partial
//! matchings of contractions:
//!
//! `A(z) B(w) = sum_M sign(M) prod <a_i(z) b_j(w)> :A_rest(z) B_rest(w):`
//!
//! where `<d^k x(z) d^l y(w)> = c (-1)^k (k+l)! (z-w)^{-(k+l+1)}` and `c` is
//! the base contraction of `x` with `y`. Taylor expanding `A_rest(z)` about
//! `w` gives every circle product, singular or not, in closed form.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::kernel::{Factor, FactorVec, FieldExpr, Monomial, Rational};

/// Singular part of an OPE: pole order `p >= 1` to the coefficient of
/// `(z-w)^{-p}`, which is `a o_{p-1} b`. Zero entries are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpeTable {
    entries: BTreeMap<u32, FieldExpr>,
}

impl OpeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, pole: u32, e: FieldExpr) {
        assert!(pole >= 1, "pole order must be positive");
        if e.is_zero() {
            self.entries.remove(&pole);
        } else {
            self.entries.insert(pole, e);
        }
    }

    pub fn get(&self, pole: u32) -> FieldExpr {
        self.entries.get(&pole).cloned().unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Entries in decreasing pole order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &FieldExpr)> {
        self.entries.iter().rev().map(|(p, e)| (*p, e))
    }

    pub fn max_pole(&self) -> Option<u32> {
        self.entries.keys().next_back().copied()
    }
}

/// One contraction pattern between two monomials.
struct Matching {
    coef: Rational,
    pole: u32,
    a_rest: FactorVec,
    b_rest: FactorVec,
}

fn contraction_value(x: &Factor, y: &Factor) -> Option<(Rational, u32)> {
    let c = x.symbol.contraction(&y.symbol);
    if c == 0 {
        return None;
    }
    let (k, l) = (x.order as u32, y.order as u32);
    let sign = if k % 2 == 0 { c } else { -c };
    Some((Rational::from_int(sign) * Rational::factorial(k + l), k + l + 1))
}

/// Enumerates every partial matching, including the empty one.
fn matchings(a: &[Factor], b: &[Factor], min_pole: u32) -> Vec<Matching> {
    let p = a.len();
    let mut out = Vec::new();
    let mut pair_of: Vec<Option<usize>> = vec![None; p];
    let mut used = vec![false; b.len()];
    fn rec(
        i: usize,
        a: &[Factor],
        b: &[Factor],
        pair_of: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        coef: Rational,
        pole: u32,
        min_pole: u32,
        out: &mut Vec<Matching>,
    ) {
        if i == a.len() {
            if pole >= min_pole {
                out.push(finish(a, b, pair_of, coef, pole));
            }
            return;
        }
        pair_of[i] = None;
        rec(i + 1, a, b, pair_of, used, coef.clone(), pole, min_pole, out);
        for j in 0..b.len() {
            if used[j] {
                continue;
            }
            if let Some((c, q)) = contraction_value(&a[i], &b[j]) {
                used[j] = true;
                pair_of[i] = Some(j);
                rec(i + 1, a, b, pair_of, used, &coef * &c, pole + q, min_pole, out);
                used[j] = false;
                pair_of[i] = None;
            }
        }
    }
    rec(0, a, b, &mut pair_of, &mut used, Rational::one(), 0, min_pole, &mut out);
    out
}

/// Applies the fermion sign of moving each contracted pair together, ahead
/// of the uncontracted factors.
fn finish(a: &[Factor], b: &[Factor], pair_of: &[Option<usize>], coef: Rational, pole: u32) -> Matching {
    let p = a.len();
    let mut order: Vec<(usize, bool)> = Vec::with_capacity(p + b.len());
    let mut matched_b = vec![false; b.len()];
    for (i, pj) in pair_of.iter().enumerate() {
        if let Some(j) = *pj {
            order.push((i, a[i].is_odd()));
            order.push((p + j, b[j].is_odd()));
            matched_b[j] = true;
        }
    }
    let mut a_rest = FactorVec::new();
    let mut b_rest = FactorVec::new();
    for (i, pj) in pair_of.iter().enumerate() {
        if pj.is_none() {
            order.push((i, a[i].is_odd()));
            a_rest.push(a[i]);
        }
    }
    for (j, m) in matched_b.iter().enumerate() {
        if !m {
            order.push((p + j, b[j].is_odd()));
            b_rest.push(b[j]);
        }
    }
    let mut inversions = 0usize;
    for x in 0..order.len() {
        if !order[x].1 {
            continue;
        }
        for y in x + 1..order.len() {
            if order[y].1 && order[y].0 < order[x].0 {
                inversions += 1;
            }
        }
    }
    let coef = if inversions % 2 == 1 { -coef } else { coef };
    Matching { coef, pole, a_rest, b_rest }
}

/// `d^j(m) / j!` for `j = 0..=jmax`.
fn scaled_derivatives(m: &FactorVec, jmax: u32) -> Vec<FieldExpr> {
    let mut out = Vec::with_capacity(jmax as usize + 1);
    let mut cur = FieldExpr::term(Monomial::from_sorted(m.clone()), Rational::one());
    out.push(cur.clone());
    for j in 1..=jmax {
        cur = cur.derivative().scale(&Rational::new(1, j as i64));
        out.push(cur.clone());
    }
    out
}

fn accumulate(out: &mut FieldExpr, left: &FieldExpr, right: &Monomial, coef: &Rational) {
    for (m, c) in left.terms() {
        if let Some((prod, neg)) = m.times(right) {
            let v = c * coef;
            out.add_term(prod, if neg { -v } else { v });
        }
    }
}

/// `A o_n B` for single monomials.
fn circle_monomials(a: &Monomial, b: &Monomial, n: i64, out: &mut FieldExpr) {
    let min_pole = if n >= 0 { (n + 1) as u32 } else { 0 };
    for mt in matchings(a.factors(), b.factors(), min_pole) {
        let j = mt.pole as i64 - n - 1;
        if j < 0 {
            continue;
        }
        let derivs = scaled_derivatives(&mt.a_rest, j as u32);
        let b_rest = Monomial::from_sorted(mt.b_rest);
        accumulate(out, &derivs[j as usize], &b_rest, &mt.coef);
    }
}

/// Term-pair count above which products are split across threads.
const PARALLEL_THRESHOLD: usize = 256;

fn par_sum<F>(a: &FieldExpr, b: &FieldExpr, f: F) -> FieldExpr
where
    F: Fn(&Monomial, &Rational, &Monomial, &Rational, &mut FieldExpr) + Sync,
{
    let left: Vec<(&Monomial, &Rational)> = a.terms().collect();
    let right: Vec<(&Monomial, &Rational)> = b.terms().collect();
    if left.len() * right.len() < PARALLEL_THRESHOLD {
        let mut out = FieldExpr::zero();
        for (ma, ca) in &left {
            for (mb, cb) in &right {
                f(ma, ca, mb, cb, &mut out);
            }
        }
        return out;
    }
    left.par_iter()
        .fold(FieldExpr::zero, |mut acc, (ma, ca)| {
            for (mb, cb) in &right {
                f(ma, ca, mb, cb, &mut acc);
            }
            acc
        })
        .reduce(FieldExpr::zero, |mut x, y| {
            x += &y;
            x
        })
}

/// The circle product `a o_n b`, for any integer `n`. Bilinear; `n = -1` is
/// the Wick product and `n <= -2` gives `:(d^{-n-1} a) b: / (-n-1)!`.
pub fn circle(a: &FieldExpr, b: &FieldExpr, n: i64) -> FieldExpr {
    par_sum(a, b, |ma, ca, mb, cb, out| {
        let mut part = FieldExpr::zero();
        circle_monomials(ma, mb, n, &mut part);
        out.add_scaled(&part, &(ca * cb));
    })
}

/// Wick product `:ab:`.
pub fn wick(a: &FieldExpr, b: &FieldExpr) -> FieldExpr {
    circle(a, b, -1)
}

/// Right-nested normal ordering `:f_1 :f_2 ... f_k:...:`. The empty product
/// is `1`.
pub fn normal_order(fields: &[FieldExpr]) -> FieldExpr {
    let Some((last, init)) = fields.split_last() else {
        return FieldExpr::one();
    };
    init.iter().rev().fold(last.clone(), |acc, f| wick(f, &acc))
}

/// Translation `d a`.
pub fn derivative(a: &FieldExpr) -> FieldExpr {
    a.derivative()
}

/// All nonzero singular products `a o_n b`, `n >= 0`, in one pass.
pub fn ope_singular(a: &FieldExpr, b: &FieldExpr) -> OpeTable {
    #[derive(Default)]
    struct Acc(BTreeMap<u32, FieldExpr>);
    let per_pair = |ma: &Monomial, mb: &Monomial, coef: &Rational, acc: &mut Acc| {
        for mt in matchings(ma.factors(), mb.factors(), 1) {
            let derivs = scaled_derivatives(&mt.a_rest, mt.pole - 1);
            let b_rest = Monomial::from_sorted(mt.b_rest);
            let c = &mt.coef * coef;
            // Pole order p = P - j, for j = 0..P-1.
            for (j, d) in derivs.iter().enumerate() {
                let pole = mt.pole - j as u32;
                accumulate(acc.0.entry(pole).or_default(), d, &b_rest, &c);
            }
        }
    };
    let left: Vec<(&Monomial, &Rational)> = a.terms().collect();
    let right: Vec<(&Monomial, &Rational)> = b.terms().collect();
    let merge = |mut x: Acc, y: Acc| {
        for (p, e) in y.0 {
            *x.0.entry(p).or_default() += &e;
        }
        x
    };
    let acc = if left.len() * right.len() < PARALLEL_THRESHOLD {
        let mut acc = Acc::default();
        for (ma, ca) in &left {
            for (mb, cb) in &right {
                per_pair(ma, mb, &(*ca * *cb), &mut acc);
            }
        }
        acc
    } else {
        left.par_iter()
            .fold(Acc::default, |mut acc, (ma, ca)| {
                for (mb, cb) in &right {
                    per_pair(ma, mb, &(*ca * *cb), &mut acc);
                }
                acc
            })
            .reduce(Acc::default, merge)
    };
    let mut table = OpeTable::new();
    for (p, e) in acc.0 {
        table.insert(p, e);
    }
    table
}

/// `true` iff the OPE of `a` with `b` is regular.
pub fn commutes(a: &FieldExpr, b: &FieldExpr) -> bool {
    ope_singular(a, b).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Symbol;

    fn g(s: Symbol) -> FieldExpr {
        FieldExpr::generator(s)
    }

    #[test]
    fn base_contractions() {
        let (b, c) = (g(Symbol::beta(1, 1)), g(Symbol::gamma(1, 1)));
        assert_eq!(circle(&b, &c, 0), FieldExpr::one());
        assert_eq!(circle(&c, &b, 0), -FieldExpr::one());
        let (x, y) = (g(Symbol::b(1, 2)), g(Symbol::c(1, 2)));
        assert_eq!(circle(&x, &y, 0), FieldExpr::one());
        assert_eq!(circle(&y, &x, 0), FieldExpr::one());
        assert!(ope_singular(&b, &g(Symbol::beta(2, 2))).is_empty());
        assert!(commutes(&b, &g(Symbol::beta(1, 2))));
        assert!(!commutes(&b, &c));
    }

    #[test]
    fn unit_laws() {
        let a = g(Symbol::gamma(2, 1));
        assert_eq!(circle(&a, &FieldExpr::one(), -2), a.derivative());
        assert_eq!(circle(&a, &FieldExpr::one(), -1), a);
        assert_eq!(wick(&FieldExpr::one(), &a), a);
        assert!(circle(&FieldExpr::one(), &a, 0).is_zero());
    }

    #[test]
    fn wick_of_reordered_pair_has_no_correction() {
        let (b, c) = (g(Symbol::beta(1, 1)), g(Symbol::gamma(1, 1)));
        assert_eq!(wick(&c, &b), wick(&b, &c));
        assert_eq!(wick(&b, &c).len(), 1);
        let (x, y) = (g(Symbol::b(1, 1)), g(Symbol::c(1, 1)));
        assert_eq!(wick(&y, &x), -wick(&x, &y));
    }

    #[test]
    fn heisenberg_pole_two() {
        // h = :beta gamma: has h(z)h(w) ~ -1/(z-w)^2.
        let h = wick(&g(Symbol::beta(1, 1)), &g(Symbol::gamma(1, 1)));
        let t = ope_singular(&h, &h);
        assert_eq!(t.len(), 1);
        assert_eq!(t.get(2), -FieldExpr::one());
        assert_eq!(circle(&h, &h, 1), -FieldExpr::one());
    }

    #[test]
    fn translation_covariance_on_composites() {
        let h = wick(&g(Symbol::beta(1, 1)), &g(Symbol::gamma(1, 1)));
        let k = wick(&g(Symbol::b(1, 1)), &g(Symbol::gamma(1, 1)).derivative());
        for n in -3i64..4 {
            let lhs = circle(&h.derivative(), &k, n);
            let rhs = circle(&h, &k, n - 1).scale(&Rational::from_int(-n));
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }
}
