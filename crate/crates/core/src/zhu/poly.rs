//! Commutative polynomials with rational coefficients over numbered
//! indeterminates.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::kernel::Rational;

pub type Var = u16;

/// `c_i` for `1 <= i <= 15`; in module families `c_i` stands for `lambda_i`.
pub const fn c(i: u8) -> Var {
    i as Var
}
pub const A: Var = 40;
pub const M: Var = 41;
pub const I: Var = 42;

/// A monomial as `(variable, exponent)` pairs sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PolyMonomial(SmallVec<[(Var, u16); 6]>);

impl PolyMonomial {
    pub fn var(v: Var) -> Self {
        PolyMonomial(smallvec::smallvec![(v, 1)])
    }

    pub fn powers(&self) -> &[(Var, u16)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e as u32).sum()
    }

    pub fn exponent(&self, v: Var) -> u16 {
        self.0.iter().find(|p| p.0 == v).map(|p| p.1).unwrap_or(0)
    }

    fn times(&self, other: &PolyMonomial) -> PolyMonomial {
        let mut out: SmallVec<[(Var, u16); 6]> = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
        PolyMonomial(out)
    }

    fn without(&self, v: Var) -> PolyMonomial {
        PolyMonomial(self.0.iter().copied().filter(|p| p.0 != v).collect())
    }

    /// `self / other` if `other` divides it.
    fn divide(&self, other: &PolyMonomial) -> Option<PolyMonomial> {
        let mut out: SmallVec<[(Var, u16); 6]> = SmallVec::new();
        for &(v, e) in &self.0 {
            let f = other.exponent(v);
            if f > e {
                return None;
            }
            if e > f {
                out.push((v, e - f));
            }
        }
        if other.0.iter().any(|&(v, _)| self.exponent(v) == 0) {
            return None;
        }
        Some(PolyMonomial(out))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<PolyMonomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(PolyMonomial::default(), c);
        p
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from_int(c))
    }

    pub fn var(v: Var) -> Self {
        let mut p = Self::zero();
        p.add_term(PolyMonomial::var(v), Rational::one());
        p
    }

    pub fn add_term(&mut self, m: PolyMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PolyMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &PolyMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
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

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&PolyMonomial::default()).cloned(),
            _ => None,
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(PolyMonomial::degree).max()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        let mut out = Poly::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::int(1);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Replaces `v` by `value` everywhere.
    pub fn substitute(&self, v: Var, value: &Poly) -> Poly {
        let mut cache: BTreeMap<u16, Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            let rest = Poly { terms: [(m.without(v), c.clone())].into_iter().collect() };
            let power = cache.entry(e).or_insert_with(|| value.pow(e as u32)).clone();
            out += &rest.mul(&power);
        }
        out
    }

    /// Evaluates at a point; unassigned variables are an error.
    pub fn evaluate(&self, point: &BTreeMap<Var, Rational>) -> Option<Rational> {
        let mut s = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.powers() {
                t = t * point.get(&v)?.pow(e as u32);
            }
            s += &t;
        }
        Some(s)
    }

    /// Writes `self = a * v + b` when `self` is affine in `v`.
    pub fn split_linear(&self, v: Var) -> Option<(Poly, Poly)> {
        let mut a = Poly::zero();
        let mut b = Poly::zero();
        for (m, c) in &self.terms {
            match m.exponent(v) {
                0 => b.add_term(m.clone(), c.clone()),
                1 => a.add_term(m.without(v), c.clone()),
                _ => return None,
            }
        }
        Some((a, b))
    }

    /// Leading term in lexicographic order with `c1 > c2 > ...`.
    fn leading(&self) -> Option<(&PolyMonomial, &Rational)> {
        self.terms.iter().max_by(|x, y| lex(x.0, y.0))
    }

    /// Exact quotient `self / d` by multivariate long division; `None` if
    /// `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (lead_m, lead_c) = d.leading()?;
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.divide(lead_m)?;
            let qc = &c / lead_c;
            let step = Poly { terms: [(qm.clone(), qc.clone())].into_iter().collect() };
            rem -= &step.mul(d);
            q.add_term(qm, qc);
        }
        Some(q)
    }

    pub fn render(&self, name: &dyn Fn(Var) -> String) -> String {
        let terms = self.terms.iter().rev().map(|(m, c)| {
            let body: Vec<String> = m
                .powers()
                .iter()
                .map(|&(v, e)| if e == 1 { name(v) } else { format!("{}^{e}", name(v)) })
                .collect();
            (c.clone(), if body.is_empty() { None } else { Some(body.join("*")) })
        });
        crate::syntax::join_terms(terms)
    }
}

fn lex(a: &PolyMonomial, b: &PolyMonomial) -> std::cmp::Ordering {
    let mut vars: Vec<Var> = a.0.iter().chain(b.0.iter()).map(|p| p.0).collect();
    vars.sort_unstable();
    vars.dedup();
    for v in vars {
        let o = a.exponent(v).cmp(&b.exponent(v));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Default names: `c1..`, `a`, `m`, `i`, otherwise `v<k>`.
pub fn default_name(v: Var) -> String {
    match v {
        A => "a".into(),
        M => "m".into(),
        I => "i".into(),
        1..=15 => format!("c{v}"),
        _ => format!("v{v}"),
    }
}

/// Names for module families, where `c_i` (`i >= 2`) is the eigenvalue `lambda_i`.
pub fn family_name(v: Var) -> String {
    match v {
        2..=15 => format!("l{v}"),
        _ => default_name(v),
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&default_name))
    }
}

impl std::ops::AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl std::ops::SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl std::ops::Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl std::ops::Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl std::ops::Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::mul(self, rhs)
    }
}

/// Parses `1/2*c2 - c1^2 + 3` style text over the default names.
pub fn parse_poly(text: &str) -> Option<Poly> {
    let var = |s: &str| -> Option<Var> {
        match s {
            "a" => Some(A),
            "m" => Some(M),
            "i" => Some(I),
            _ => {
                let rest = s.strip_prefix('c').or_else(|| s.strip_prefix('l'))?;
                let k: u8 = rest.parse().ok()?;
                (1..=15).contains(&k).then_some(c(k))
            }
        }
    };
    let mut out = Poly::zero();
    let cleaned = text.replace(' ', "");
    let mut rest = cleaned.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1, &rest[1..]),
            b'+' => (1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let (term, tail) = body.split_at(end);
        rest = tail;
        let mut coef = Rational::from_int(sign);
        let mut mono = PolyMonomial::default();
        for factor in term.split('*') {
            if factor.starts_with(|ch: char| ch.is_ascii_digit()) {
                coef = coef * factor.parse::<Rational>().ok()?;
            } else {
                let (name, e) = match factor.split_once('^') {
                    Some((nm, e)) => (nm, e.parse::<u16>().ok()?),
                    None => (factor, 1),
                };
                let v = var(name)?;
                for _ in 0..e {
                    mono = mono.times(&PolyMonomial::var(v));
                }
            }
        }
        out.add_term(mono, coef);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_division() {
        let m = Poly::var(M);
        let a = Poly::var(A);
        let p = &(&m * &a) + &m.scale(&Rational::from_int(-3));
        assert_eq!(p.exact_div(&m).unwrap(), &a - &Poly::int(3));
        assert!(p.exact_div(&a).is_none());
        let f = &(&a + &m) * &(&a - &Poly::int(2));
        assert_eq!(f.exact_div(&(&a - &Poly::int(2))).unwrap(), &a + &m);
        let sq = (&a + &m).pow(2);
        assert_eq!(sq.substitute(A, &(&Poly::int(0) - &m)), Poly::zero());
    }

    #[test]
    fn parse_and_render() {
        let p = parse_poly("1/2*c2 - 1/4*c1^2 - 3/2*c1 - 2").unwrap();
        assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
        assert_eq!(p.coefficient(&PolyMonomial::default()), Rational::from_int(-2));
        let (lin, rest) = p.split_linear(c(2)).unwrap();
        assert_eq!(lin, Poly::constant(Rational::new(1, 2)));
        assert_eq!(rest.len(), 3);
        assert!(p.split_linear(c(1)).is_none());
    }
}
