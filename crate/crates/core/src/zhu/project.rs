//! The Zhu map from the `beta gamma` system onto the Weyl algebra.

use std::collections::HashMap;

use crate::kernel::{Factor, Family, FieldExpr, Monomial, Rational};
use crate::ope;

use super::weyl::WeylElement;
use super::ZhuError;

/// Conformal weights assigned to `beta` and `gamma`; they sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZhuGrading {
    /// `wt beta = 1`, `wt gamma = 0`.
    Integral,
    /// `wt beta = wt gamma = 1/2`.
    Symmetric,
}

impl ZhuGrading {
    pub fn generator_weight(self, family: Family) -> Rational {
        match (self, family) {
            (ZhuGrading::Integral, Family::Beta) => Rational::one(),
            (ZhuGrading::Integral, _) => Rational::zero(),
            (ZhuGrading::Symmetric, _) => Rational::new(1, 2),
        }
    }

    pub fn factor_weight(self, f: &Factor) -> Rational {
        self.generator_weight(f.symbol.family) + Rational::from_int(f.order as i64)
    }

    pub fn monomial_weight(self, m: &Monomial) -> Rational {
        m.factors().iter().map(|f| self.factor_weight(f)).sum()
    }

    /// The common weight of all terms.
    pub fn weight(self, e: &FieldExpr) -> Result<Rational, ZhuError> {
        let mut w: Option<Rational> = None;
        for (m, _) in e.terms() {
            let x = self.monomial_weight(m);
            match &w {
                None => w = Some(x),
                Some(y) if *y != x => return Err(ZhuError::Inhomogeneous),
                _ => {}
            }
        }
        Ok(w.unwrap_or_else(Rational::zero))
    }
}

/// `a * b = sum_{j>=0} C(wt a, j) a o_{j-1} b` for homogeneous `a`.
pub fn zhu_star(grading: ZhuGrading, a: &FieldExpr, b: &FieldExpr) -> Result<FieldExpr, ZhuError> {
    let w = grading.weight(a)?;
    let mut out = ope::wick(a, b);
    for (pole, e) in ope::ope_singular(a, b).iter() {
        out.add_scaled(e, &Rational::binomial(&w, pole));
    }
    Ok(out)
}

/// Memoized Zhu map on monomials.
#[derive(Debug)]
pub struct ZhuProjector {
    n: u8,
    grading: ZhuGrading,
    memo: HashMap<Monomial, WeylElement>,
}

impl ZhuProjector {
    pub fn new(n: u8, grading: ZhuGrading) -> Self {
        ZhuProjector { n, grading, memo: HashMap::new() }
    }

    pub fn grading(&self) -> ZhuGrading {
        self.grading
    }

    /// `gamma -> x'`, `beta -> d`, `d^k a -> prod_{t<k} (-(wt a + t)) a`,
    /// extended through `:f R: = f * R - sum_{j>=1} C(wt f, j) f o_{j-1} R`.
    pub fn project(&mut self, e: &FieldExpr) -> Result<WeylElement, ZhuError> {
        let mut out = WeylElement::zero(self.n);
        for (m, c) in e.terms() {
            if m.factors().iter().any(|f| f.symbol.is_odd()) {
                return Err(ZhuError::Fermionic);
            }
            if m.factors().iter().any(|f| f.symbol.row > self.n || f.symbol.col > self.n) {
                return Err(ZhuError::RankMismatch);
            }
            let p = self.project_monomial(m);
            out.add_scaled(&p, c);
        }
        Ok(out)
    }

    fn project_factor(&self, f: &Factor) -> WeylElement {
        let s = f.symbol;
        let base = match s.family {
            Family::Gamma => WeylElement::x(self.n, s.row, s.col),
            _ => WeylElement::d(self.n, s.row, s.col),
        };
        let w = self.grading.generator_weight(s.family);
        let mut c = Rational::one();
        for t in 0..f.order {
            c = c * -(&w + &Rational::from_int(t as i64));
        }
        base.scale(&c)
    }

    fn project_monomial(&mut self, m: &Monomial) -> WeylElement {
        if let Some(p) = self.memo.get(m) {
            return p.clone();
        }
        let out = match m.factors() {
            [] => WeylElement::one(self.n),
            [f] => self.project_factor(f),
            [f, rest @ ..] => {
                let head = FieldExpr::factor(*f);
                let tail = Monomial::from_sorted(rest.iter().copied().collect());
                let mut out = self.project_factor(f).mul(&self.project_monomial(&tail));
                let wf = self.grading.factor_weight(f);
                let tail_field = FieldExpr::term(tail, Rational::one());
                for (pole, e) in ope::ope_singular(&head, &tail_field).iter() {
                    let c = Rational::binomial(&wf, pole);
                    if c.is_zero() {
                        continue;
                    }
                    for (mm, cc) in e.terms() {
                        let p = self.project_monomial(mm);
                        out.add_scaled(&p, &-(&c * cc));
                    }
                }
                out
            }
        };
        self.memo.insert(m.clone(), out.clone());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Symbol;

    fn beta() -> FieldExpr {
        FieldExpr::generator(Symbol::beta(1, 1))
    }

    fn gamma() -> FieldExpr {
        FieldExpr::generator(Symbol::gamma(1, 1))
    }

    #[test]
    fn star_of_generators() {
        let s = zhu_star(ZhuGrading::Symmetric, &beta(), &gamma()).unwrap();
        let mut want = ope::wick(&beta(), &gamma());
        want.add_scaled(&FieldExpr::one(), &Rational::new(1, 2));
        assert_eq!(s, want);
        assert_eq!(zhu_star(ZhuGrading::Symmetric, &FieldExpr::one(), &gamma()).unwrap(), gamma());
    }

    #[test]
    fn projection_of_pairs() {
        let bg = ope::wick(&beta(), &gamma());
        let x = WeylElement::x(1, 1, 1);
        let d = WeylElement::d(1, 1, 1);
        let mut p = ZhuProjector::new(1, ZhuGrading::Integral);
        assert_eq!(p.project(&bg).unwrap(), x.mul(&d));
        let mut q = ZhuProjector::new(1, ZhuGrading::Symmetric);
        let mut want = x.mul(&d);
        want.add_scaled(&WeylElement::one(1), &Rational::new(1, 2));
        assert_eq!(q.project(&bg).unwrap(), want);
    }

    #[test]
    fn derivative_rule_and_rejections() {
        for g in [ZhuGrading::Integral, ZhuGrading::Symmetric] {
            let mut p = ZhuProjector::new(1, g);
            let a = ope::wick(&beta(), &ope::wick(&beta(), &gamma()));
            let w = g.weight(&a).unwrap();
            assert_eq!(p.project(&a.derivative()).unwrap(), p.project(&a).unwrap().scale(&-w));
        }
        let mut p = ZhuProjector::new(1, ZhuGrading::Integral);
        assert_eq!(p.project(&FieldExpr::generator(Symbol::b(1, 1))), Err(ZhuError::Fermionic));
        assert_eq!(p.project(&FieldExpr::generator(Symbol::beta(2, 1))), Err(ZhuError::RankMismatch));
        assert!(zhu_star(ZhuGrading::Integral, &(beta() + gamma()), &beta()).is_err());
    }
}
