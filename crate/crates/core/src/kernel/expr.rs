//! Normally ordered monomials and their exact linear combinations.
//!
//! For free generators the right-nested normal ordering of a word of
//! generator derivatives is supercommutative: every factor is a creation
//! mode, and creation modes of free fields (anti)commute. A monomial is
//! therefore stored as a sorted factor list, with the sign of any odd
//! transposition absorbed into the coefficient and repeated odd factors
//! annihilating the term.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use smallvec::SmallVec;

use super::{Factor, KernelError, Rational};

pub type FactorVec = SmallVec<[Factor; 8]>;

/// A sorted word of factors. Odd factors are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(FactorVec);

/// Sorts `factors` into canonical order in place. Returns `None` if an odd
/// factor repeats (the term vanishes), otherwise whether the reordering
/// introduced a sign.
pub fn sort_signed(factors: &mut [Factor]) -> Option<bool> {
    let mut negative = false;
    for i in 1..factors.len() {
        let mut j = i;
        while j > 0 && factors[j - 1] > factors[j] {
            if factors[j - 1].is_odd() && factors[j].is_odd() {
                negative = !negative;
            }
            factors.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in factors.windows(2) {
        if w[0] == w[1] && w[0].is_odd() {
            return None;
        }
    }
    Some(negative)
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial(FactorVec::new())
    }

    /// Canonical monomial for an arbitrary factor word, with its sign.
    pub fn from_factors<I: IntoIterator<Item = Factor>>(factors: I) -> Option<(Monomial, bool)> {
        let mut v: FactorVec = factors.into_iter().collect();
        let neg = sort_signed(&mut v)?;
        Some((Monomial(v), neg))
    }

    /// Wraps an already sorted word. Debug builds check the invariant.
    pub fn from_sorted(factors: FactorVec) -> Monomial {
        debug_assert!(factors.windows(2).all(|w| w[0] < w[1] || (w[0] == w[1] && !w[0].is_odd())));
        Monomial(factors)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.0.iter().filter(|f| f.is_odd()).count() % 2 == 1
    }

    pub fn weight(&self) -> Rational {
        let halves: i64 = self.0.iter().map(|f| 1 + 2 * f.order as i64).sum();
        Rational::new(halves, 2)
    }

    pub fn charge(&self) -> i64 {
        self.0.iter().map(|f| f.symbol.family.charge()).sum()
    }

    /// Supercommutative product `self * other`, with its sign.
    pub fn times(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        Monomial::from_factors(self.0.iter().chain(other.0.iter()).copied())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.len() {
            0 => write!(f, "1"),
            1 => write!(f, "{}", self.0[0]),
            _ => {
                write!(f, "NO(")?;
                for (i, x) in self.0.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// An exact linear combination of normally ordered monomials.
///
/// Invariant: no stored coefficient is zero. The empty map is the zero field;
/// the unit monomial with coefficient 1 is the vacuum field `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FieldExpr {
    terms: BTreeMap<Monomial, Rational>,
}

impl FieldExpr {
    pub fn zero() -> Self {
        FieldExpr::default()
    }

    pub fn one() -> Self {
        Self::scalar(Rational::one())
    }

    pub fn scalar(c: Rational) -> Self {
        Self::term(Monomial::unit(), c)
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut e = FieldExpr::zero();
        e.add_term(m, c);
        e
    }

    pub fn factor(f: Factor) -> Self {
        Self::term(Monomial(smallvec::smallvec![f]), Rational::one())
    }

    pub fn generator(s: super::Symbol) -> Self {
        Self::factor(Factor::new(s, 0))
    }

    /// Canonical form of an unordered sum of factor words. Linear and
    /// idempotent; with `rank` given, every index must lie in `1..=rank`.
    pub fn canonicalize<I, W>(raw: I, rank: Option<u8>) -> Result<FieldExpr, KernelError>
    where
        I: IntoIterator<Item = (W, Rational)>,
        W: IntoIterator<Item = Factor>,
    {
        let mut out = FieldExpr::zero();
        for (word, c) in raw {
            let word: FactorVec = word.into_iter().collect();
            if let Some(r) = rank {
                for f in &word {
                    let s = f.symbol;
                    if s.row == 0 || s.col == 0 || s.row > r || s.col > r {
                        return Err(KernelError::IndexOutOfRank { symbol: s, rank: r });
                    }
                }
            }
            if let Some((m, neg)) = Monomial::from_factors(word) {
                out.add_term(m, if neg { -c } else { c });
            }
        }
        Ok(out)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FieldExpr, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The scalar value if the expression is a multiple of `1` (or zero).
    pub fn as_scalar(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::unit()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> FieldExpr {
        if c.is_zero() {
            return FieldExpr::zero();
        }
        FieldExpr {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Conformal weight. Zero is reported as weight 0.
    pub fn weight(&self) -> Result<Rational, KernelError> {
        let mut it = self.terms.keys().map(Monomial::weight);
        let Some(first) = it.next() else {
            return Ok(Rational::zero());
        };
        for w in it {
            if w != first {
                return Err(KernelError::InhomogeneousWeight { first, second: w });
            }
        }
        Ok(first)
    }

    /// Filtration degree: the longest monomial. `None` is the -infinity of zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::len).max()
    }

    pub fn fermionic_charge(&self) -> Result<i64, KernelError> {
        let mut it = self.terms.keys().map(Monomial::charge);
        let Some(first) = it.next() else {
            return Ok(0);
        };
        for q in it {
            if q != first {
                return Err(KernelError::InhomogeneousCharge { first, second: q });
            }
        }
        Ok(first)
    }

    /// Parity of a homogeneous expression; `None` if mixed.
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(Monomial::is_odd);
        let first = it.next().unwrap_or(false);
        it.all(|p| p == first).then_some(first)
    }

    /// Translation `d`, by the Leibniz rule on factors.
    pub fn derivative(&self) -> FieldExpr {
        let mut out = FieldExpr::zero();
        for (m, c) in &self.terms {
            for i in 0..m.len() {
                let mut v = m.0.clone();
                v[i] = v[i].derive();
                if let Some(neg) = sort_signed(&mut v) {
                    out.add_term(Monomial(v), if neg { -c } else { c.clone() });
                }
            }
        }
        out
    }

    pub fn nth_derivative(&self, k: u32) -> FieldExpr {
        let mut e = self.clone();
        for _ in 0..k {
            e = e.derivative();
        }
        e
    }

    /// Supercommutative product of the stored monomials. This is the Wick
    /// product only when no contraction connects the two operands.
    pub fn juxtapose(&self, other: &FieldExpr) -> FieldExpr {
        let mut out = FieldExpr::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some((m, neg)) = a.times(b) {
                    let c = x * y;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    /// Every symbol index lies in `1..=rank`.
    pub fn check_rank(&self, rank: u8) -> Result<(), KernelError> {
        for m in self.terms.keys() {
            for f in m.factors() {
                let s = f.symbol;
                if s.row == 0 || s.col == 0 || s.row > rank || s.col > rank {
                    return Err(KernelError::IndexOutOfRank { symbol: s, rank });
                }
            }
        }
        Ok(())
    }
}

impl FromIterator<(Monomial, Rational)> for FieldExpr {
    fn from_iter<T: IntoIterator<Item = (Monomial, Rational)>>(iter: T) -> Self {
        let mut e = FieldExpr::zero();
        for (m, c) in iter {
            e.add_term(m, c);
        }
        e
    }
}

impl AddAssign<&FieldExpr> for FieldExpr {
    fn add_assign(&mut self, rhs: &FieldExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&FieldExpr> for FieldExpr {
    fn sub_assign(&mut self, rhs: &FieldExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add<&FieldExpr> for &FieldExpr {
    type Output = FieldExpr;
    fn add(self, rhs: &FieldExpr) -> FieldExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for FieldExpr {
    type Output = FieldExpr;
    fn add(mut self, rhs: FieldExpr) -> FieldExpr {
        self += &rhs;
        self
    }
}

impl Sub<&FieldExpr> for &FieldExpr {
    type Output = FieldExpr;
    fn sub(self, rhs: &FieldExpr) -> FieldExpr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for FieldExpr {
    type Output = FieldExpr;
    fn sub(mut self, rhs: FieldExpr) -> FieldExpr {
        self -= &rhs;
        self
    }
}

impl Neg for &FieldExpr {
    type Output = FieldExpr;
    fn neg(self) -> FieldExpr {
        self.scale(&-Rational::one())
    }
}

impl Neg for FieldExpr {
    type Output = FieldExpr;
    fn neg(self) -> FieldExpr {
        -&self
    }
}

impl Mul<&FieldExpr> for &Rational {
    type Output = FieldExpr;
    fn mul(self, rhs: &FieldExpr) -> FieldExpr {
        rhs.scale(self)
    }
}

impl Mul<FieldExpr> for Rational {
    type Output = FieldExpr;
    fn mul(self, rhs: FieldExpr) -> FieldExpr {
        rhs.scale(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::super::Symbol;
    use super::*;

    fn f(s: Symbol, k: u16) -> Factor {
        Factor::new(s, k)
    }

    #[test]
    fn odd_swap_flips_sign() {
        let (m1, n1) = Monomial::from_factors([f(Symbol::b(1, 1), 0), f(Symbol::c(1, 1), 0)]).unwrap();
        let (m2, n2) = Monomial::from_factors([f(Symbol::c(1, 1), 0), f(Symbol::b(1, 1), 0)]).unwrap();
        assert_eq!(m1, m2);
        assert!(!n1 && n2);
        assert!(Monomial::from_factors([f(Symbol::b(1, 2), 1), f(Symbol::b(1, 2), 1)]).is_none());
        let (_, n3) = Monomial::from_factors([f(Symbol::gamma(1, 1), 0), f(Symbol::beta(1, 1), 0)]).unwrap();
        assert!(!n3);
    }

    #[test]
    fn gradings() {
        let e = FieldExpr::canonicalize(
            [(vec![f(Symbol::beta(1, 1), 0), f(Symbol::gamma(1, 1), 0)], Rational::one())],
            Some(1),
        )
        .unwrap();
        assert_eq!(e.weight().unwrap(), Rational::one());
        assert_eq!(e.degree(), Some(2));
        assert_eq!(FieldExpr::one().degree(), Some(0));
        assert_eq!(FieldExpr::zero().degree(), None);
        assert_eq!(FieldExpr::generator(Symbol::b(1, 2)).fermionic_charge().unwrap(), -1);
        assert_eq!(FieldExpr::generator(Symbol::c(1, 2)).fermionic_charge().unwrap(), 1);
        let mixed = FieldExpr::generator(Symbol::beta(1, 1)) + FieldExpr::one();
        assert!(matches!(mixed.weight(), Err(KernelError::InhomogeneousWeight { .. })));
    }

    #[test]
    fn rank_is_enforced() {
        let r = FieldExpr::canonicalize([(vec![f(Symbol::beta(3, 1), 0)], Rational::one())], Some(2));
        assert!(matches!(r, Err(KernelError::IndexOutOfRank { .. })));
    }

    #[test]
    fn cancellation_gives_zero() {
        let a = FieldExpr::generator(Symbol::gamma(2, 1));
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn leibniz() {
        let bg = FieldExpr::generator(Symbol::beta(1, 1)).juxtapose(&FieldExpr::generator(Symbol::gamma(1, 1)));
        let d = bg.derivative();
        assert_eq!(d.len(), 2);
        assert_eq!(d.weight().unwrap(), Rational::from_int(2));
        assert!(FieldExpr::one().derivative().is_zero());
        // d(b b') = b' b' + b b'' and the first term vanishes.
        let bb = FieldExpr::canonicalize(
            [(vec![f(Symbol::b(1, 1), 0), f(Symbol::b(1, 1), 1)], Rational::one())],
            None,
        )
        .unwrap();
        assert_eq!(bb.derivative().len(), 1);
    }
}
