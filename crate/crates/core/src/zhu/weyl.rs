//! The Weyl algebra on `n x n` matrix coordinates `x'_{ij}` and their
//! derivations `d_{ij}`, with `[d_{ij}, x'_{kl}] = delta`.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::kernel::Rational;

type Exps = SmallVec<[u8; 16]>;

/// `prod x'^{x} prod d^{d}` with every coordinate left of every derivation;
/// exponent vectors are indexed by `(i-1) n + (j-1)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeylMonomial {
    pub x: Exps,
    pub d: Exps,
}

impl WeylMonomial {
    fn unit(n: u8) -> Self {
        let len = n as usize * n as usize;
        WeylMonomial { x: SmallVec::from_elem(0, len), d: SmallVec::from_elem(0, len) }
    }

    pub fn degree(&self) -> u32 {
        self.x.iter().chain(self.d.iter()).map(|&e| e as u32).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylElement {
    n: u8,
    terms: BTreeMap<WeylMonomial, Rational>,
}

fn slot(n: u8, i: u8, j: u8) -> usize {
    assert!(i >= 1 && j >= 1 && i <= n && j <= n, "matrix index out of range");
    (i as usize - 1) * n as usize + (j as usize - 1)
}

impl WeylElement {
    pub fn zero(n: u8) -> Self {
        WeylElement { n, terms: BTreeMap::new() }
    }

    pub fn scalar(n: u8, c: Rational) -> Self {
        let mut e = Self::zero(n);
        e.add_term(WeylMonomial::unit(n), c);
        e
    }

    pub fn one(n: u8) -> Self {
        Self::scalar(n, Rational::one())
    }

    /// The coordinate `x'_{ij}`.
    pub fn x(n: u8, i: u8, j: u8) -> Self {
        let mut m = WeylMonomial::unit(n);
        m.x[slot(n, i, j)] = 1;
        let mut e = Self::zero(n);
        e.add_term(m, Rational::one());
        e
    }

    /// The derivation `d/dx'_{ij}`.
    pub fn d(n: u8, i: u8, j: u8) -> Self {
        let mut m = WeylMonomial::unit(n);
        m.d[slot(n, i, j)] = 1;
        let mut e = Self::zero(n);
        e.add_term(m, Rational::one());
        e
    }

    pub fn rank(&self) -> u8 {
        self.n
    }

    pub fn add_term(&mut self, m: WeylMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &WeylElement, c: &Rational) {
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.n);
        out.add_scaled(self, c);
        out
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

    pub fn terms(&self) -> impl Iterator<Item = (&WeylMonomial, &Rational)> {
        self.terms.iter()
    }

    /// Bernstein degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(WeylMonomial::degree).max()
    }

    /// Terms of exactly the top Bernstein degree.
    pub fn leading_part(&self) -> Self {
        let mut out = Self::zero(self.n);
        if let Some(top) = self.degree() {
            for (m, c) in &self.terms {
                if m.degree() == top {
                    out.add_term(m.clone(), c.clone());
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &WeylElement) -> WeylElement {
        assert_eq!(self.n, other.n, "Weyl algebras of different rank");
        let mut out = Self::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                for (m, k) in reorder(&ma.d, &mb.x) {
                    let mut r = WeylMonomial::unit(self.n);
                    for v in 0..r.x.len() {
                        r.x[v] = ma.x[v] + m.0[v];
                        r.d[v] = m.1[v] + mb.d[v];
                    }
                    out.add_term(r, &c * &k);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &WeylElement) -> WeylElement {
        let mut out = self.mul(other);
        out.add_scaled(&other.mul(self), &-Rational::one());
        out
    }

    pub fn pow(&self, k: u32) -> WeylElement {
        let mut out = Self::one(self.n);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }
}

/// `d^B x^C = sum_K prod_v K_v! C(B_v, K_v) C(C_v, K_v) x^{C-K} d^{B-K}`.
fn reorder(b: &Exps, c: &Exps) -> Vec<((Exps, Exps), Rational)> {
    let mut out = vec![((c.clone(), b.clone()), Rational::one())];
    for v in 0..b.len() {
        let top = b[v].min(c[v]);
        if top == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(out.len() * (top as usize + 1));
        for ((xs, ds), coef) in &out {
            for k in 0..=top {
                let w = Rational::factorial(k as u32)
                    * Rational::binomial(&Rational::from_int(b[v] as i64), k as u32)
                    * Rational::binomial(&Rational::from_int(c[v] as i64), k as u32);
                let mut xs = xs.clone();
                let mut ds = ds.clone();
                xs[v] -= k;
                ds[v] -= k;
                next.push(((xs, ds), coef * &w));
            }
        }
        out = next;
    }
    out
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n as usize;
        let letter = |prefix: &str, v: usize, e: u8| {
            let s = format!("{prefix}[{},{}]", v / n + 1, v % n + 1);
            if e == 1 { s } else { format!("{s}^{e}") }
        };
        let terms = self.terms.iter().map(|(m, c)| {
            let mut parts: Vec<String> = Vec::new();
            for (v, &e) in m.x.iter().enumerate() {
                if e > 0 {
                    parts.push(letter("x'", v, e));
                }
            }
            for (v, &e) in m.d.iter().enumerate() {
                if e > 0 {
                    parts.push(letter("dx", v, e));
                }
            }
            (c.clone(), if parts.is_empty() { None } else { Some(parts.join("*")) })
        });
        f.write_str(&crate::syntax::join_terms(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_commutation() {
        let d = WeylElement::d(2, 1, 1);
        let x = WeylElement::x(2, 1, 1);
        let mut want = x.mul(&d);
        want.add_scaled(&WeylElement::one(2), &Rational::one());
        assert_eq!(d.mul(&x), want);
        assert_eq!(d.commutator(&WeylElement::x(2, 1, 2)), WeylElement::zero(2));
        assert_eq!(x.mul(&WeylElement::x(2, 1, 2)), WeylElement::x(2, 1, 2).mul(&x));
    }

    #[test]
    fn higher_powers() {
        // d^2 x^2 = x^2 d^2 + 4 x d + 2
        let d = WeylElement::d(1, 1, 1);
        let x = WeylElement::x(1, 1, 1);
        let lhs = d.pow(2).mul(&x.pow(2));
        let mut rhs = x.pow(2).mul(&d.pow(2));
        rhs.add_scaled(&x.mul(&d), &Rational::from_int(4));
        rhs.add_scaled(&WeylElement::one(1), &Rational::from_int(2));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.degree(), Some(4));
        assert_eq!(format!("{}", x.mul(&d)), "x'[1,1]*dx[1,1]");
    }
}
