//! Lie (super)algebra elements: `gl_n` acting on matrices from either side,
//! and `pgl(n|n)` in the basis `E+, E-, F+, F-`.

use std::collections::BTreeMap;
use std::fmt;

use crate::kernel::Rational;

/// Which `gl_n` copy: left multiplication `X -> xi X` or right
/// multiplication `X -> -X xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Basis of `gl(n|n)`. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PglBasis {
    EPlus(u8, u8),
    EMinus(u8, u8),
    FPlus(u8, u8),
    FMinus(u8, u8),
}

impl PglBasis {
    pub fn is_odd(self) -> bool {
        matches!(self, PglBasis::FPlus(..) | PglBasis::FMinus(..))
    }

    /// All `4 n^2` basis elements in a fixed order.
    pub fn all(n: u8) -> Vec<PglBasis> {
        let mut out = Vec::with_capacity(4 * n as usize * n as usize);
        for ctor in [PglBasis::EPlus, PglBasis::EMinus, PglBasis::FPlus, PglBasis::FMinus] {
            for a in 1..=n {
                for b in 1..=n {
                    out.push(ctor(a, b));
                }
            }
        }
        out
    }

    pub fn name(self) -> String {
        match self {
            PglBasis::EPlus(a, b) => format!("E+[{a},{b}]"),
            PglBasis::EMinus(a, b) => format!("E-[{a},{b}]"),
            PglBasis::FPlus(a, b) => format!("F+[{a},{b}]"),
            PglBasis::FMinus(a, b) => format!("F-[{a},{b}]"),
        }
    }
}

impl fmt::Display for PglBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A Lie algebra element tagged by the algebra it lives in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LieElement {
    /// An `n x n` matrix in one `gl_n` copy, row-major.
    Gl { side: Side, matrix: Vec<Vec<Rational>> },
    /// A `gl(n|n)` combination; read modulo the central `C`.
    Pgl(BTreeMap<PglBasis, Rational>),
}

impl LieElement {
    /// The elementary matrix `E_ij` in one copy.
    pub fn elementary(n: u8, side: Side, i: u8, j: u8) -> LieElement {
        let mut matrix = vec![vec![Rational::zero(); n as usize]; n as usize];
        matrix[i as usize - 1][j as usize - 1] = Rational::one();
        LieElement::Gl { side, matrix }
    }

    /// `E_11 - E_{i+1,i+1}`.
    pub fn cartan(n: u8, side: Side, i: u8) -> LieElement {
        let mut matrix = vec![vec![Rational::zero(); n as usize]; n as usize];
        matrix[0][0] = Rational::one();
        matrix[i as usize][i as usize] = -Rational::one();
        LieElement::Gl { side, matrix }
    }

    pub fn pgl(b: PglBasis) -> LieElement {
        LieElement::Pgl([(b, Rational::one())].into_iter().collect())
    }
}

fn delta(x: u8, y: u8) -> bool {
    x == y
}

/// Supercommutator of two `gl(n|n)` basis elements.
pub fn pgl_bracket(x: PglBasis, y: PglBasis) -> BTreeMap<PglBasis, Rational> {
    use PglBasis::*;
    let mut out: BTreeMap<PglBasis, Rational> = BTreeMap::new();
    let mut add = |b: PglBasis, c: i64| {
        let e = out.entry(b).or_insert_with(Rational::zero);
        *e += Rational::from_int(c);
        if e.is_zero() {
            out.remove(&b);
        }
    };
    match (x, y) {
        (EPlus(a, b), EPlus(c, d)) => {
            if delta(b, c) {
                add(EPlus(a, d), 1);
            }
            if delta(a, d) {
                add(EPlus(c, b), -1);
            }
        }
        (EMinus(a, b), EMinus(c, d)) => {
            if delta(b, c) {
                add(EMinus(a, d), 1);
            }
            if delta(a, d) {
                add(EMinus(c, b), -1);
            }
        }
        (EPlus(..), EMinus(..)) | (EMinus(..), EPlus(..)) => {}
        (EPlus(a, b), FPlus(c, d)) => {
            if delta(b, c) {
                add(FPlus(a, d), 1);
            }
        }
        (EMinus(a, b), FMinus(c, d)) => {
            if delta(b, c) {
                add(FMinus(a, d), 1);
            }
        }
        (EPlus(a, b), FMinus(c, d)) => {
            if delta(a, d) {
                add(FMinus(c, b), -1);
            }
        }
        (EMinus(a, b), FPlus(c, d)) => {
            if delta(a, d) {
                add(FPlus(c, b), -1);
            }
        }
        (FPlus(a, b), FMinus(c, d)) => {
            if delta(b, c) {
                add(EPlus(a, d), 1);
            }
            if delta(a, d) {
                add(EMinus(c, b), 1);
            }
        }
        (FPlus(..), FPlus(..)) | (FMinus(..), FMinus(..)) => {}
        // Remaining orders follow from [y, x] = -(-1)^{|x||y|} [x, y].
        (FPlus(..), EPlus(..))
        | (FMinus(..), EMinus(..))
        | (FMinus(..), EPlus(..))
        | (FPlus(..), EMinus(..))
        | (FMinus(..), FPlus(..)) => {
            let sign = if x.is_odd() && y.is_odd() { 1 } else { -1 };
            return pgl_bracket(y, x)
                .into_iter()
                .map(|(k, v)| (k, v * Rational::from_int(sign)))
                .collect();
        }
    }
    out
}

/// The central element `C = sum_a (E+^{aa} + E-^{aa})`.
pub fn pgl_center(n: u8) -> BTreeMap<PglBasis, Rational> {
    (1..=n)
        .flat_map(|a| [(PglBasis::EPlus(a, a), Rational::one()), (PglBasis::EMinus(a, a), Rational::one())])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scale(m: &BTreeMap<PglBasis, Rational>, c: &Rational) -> BTreeMap<PglBasis, Rational> {
        m.iter().map(|(k, v)| (*k, v * c)).filter(|(_, v)| !v.is_zero()).collect()
    }

    #[test]
    fn super_antisymmetry() {
        let basis = PglBasis::all(2);
        for &x in &basis {
            for &y in &basis {
                let sign = if x.is_odd() && y.is_odd() { 1 } else { -1 };
                assert_eq!(pgl_bracket(y, x), scale(&pgl_bracket(x, y), &Rational::from_int(sign)), "{x} {y}");
            }
        }
    }

    #[test]
    fn center_is_central() {
        let c = pgl_center(2);
        for x in PglBasis::all(2) {
            let mut total: BTreeMap<PglBasis, Rational> = BTreeMap::new();
            for (b, v) in &c {
                for (k, w) in pgl_bracket(*b, x) {
                    let e = total.entry(k).or_insert_with(Rational::zero);
                    *e += w * v;
                }
            }
            assert!(total.values().all(Rational::is_zero), "{x}");
        }
    }

    #[test]
    fn super_jacobi() {
        let basis = PglBasis::all(2);
        let br = |x: &BTreeMap<PglBasis, Rational>, y: PglBasis| {
            let mut out: BTreeMap<PglBasis, Rational> = BTreeMap::new();
            for (b, v) in x {
                for (k, w) in pgl_bracket(*b, y) {
                    let e = out.entry(k).or_insert_with(Rational::zero);
                    *e += w * v;
                }
            }
            out.retain(|_, v| !v.is_zero());
            out
        };
        let one = |b: PglBasis| -> BTreeMap<PglBasis, Rational> { [(b, Rational::one())].into_iter().collect() };
        let bl = |x: PglBasis, y: &BTreeMap<PglBasis, Rational>| {
            // [x, y] for a combination y of homogeneous parity
            let mut out: BTreeMap<PglBasis, Rational> = BTreeMap::new();
            for (b, v) in y {
                for (k, w) in pgl_bracket(x, *b) {
                    let e = out.entry(k).or_insert_with(Rational::zero);
                    *e += w * v;
                }
            }
            out.retain(|_, v| !v.is_zero());
            out
        };
        for &x in &basis {
            for &y in &basis {
                for &z in &basis {
                    // [x,[y,z]] = [[x,y],z] + (-1)^{|x||y|} [y,[x,z]]
                    let lhs = bl(x, &bl(y, &one(z)));
                    let mut rhs = br(&pgl_bracket(x, y), z);
                    let s = if x.is_odd() && y.is_odd() { -1 } else { 1 };
                    for (k, v) in bl(y, &bl(x, &one(z))) {
                        let e = rhs.entry(k).or_insert_with(Rational::zero);
                        *e += v * Rational::from_int(s);
                    }
                    rhs.retain(|_, v| !v.is_zero());
                    assert_eq!(lhs, rhs, "{x} {y} {z}");
                }
            }
        }
    }
}
