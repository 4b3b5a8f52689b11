//! Generator symbols of the free-field systems and their derivatives.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::Rational;

/// The four free-field families. Declaration order is the canonical factor
/// order: beta < gamma < b < c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    Beta,
    Gamma,
    B,
    C,
}

impl Family {
    pub fn is_odd(self) -> bool {
        matches!(self, Family::B | Family::C)
    }

    /// Fermionic charge: b carries -1, c carries +1, bosons carry 0.
    pub fn charge(self) -> i64 {
        match self {
            Family::B => -1,
            Family::C => 1,
            _ => 0,
        }
    }

    /// The family whose generators pair with this one.
    pub fn partner(self) -> Family {
        match self {
            Family::Beta => Family::Gamma,
            Family::Gamma => Family::Beta,
            Family::B => Family::C,
            Family::C => Family::B,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Beta => "beta",
            Family::Gamma => "gamma",
            Family::B => "b",
            Family::C => "c",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        match s {
            "beta" => Some(Family::Beta),
            "gamma" => Some(Family::Gamma),
            "b" => Some(Family::B),
            "c" => Some(Family::C),
            _ => None,
        }
    }
}

/// A free generator `beta^{ab}`, `gamma^{ab}`, `b^{ab}` or `c^{ab}`.
/// Indices are 1-based, as in the matrix-space basis `x_{ab}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub family: Family,
    pub row: u8,
    pub col: u8,
}

impl Symbol {
    pub const fn new(family: Family, row: u8, col: u8) -> Self {
        Symbol { family, row, col }
    }

    pub fn beta(row: u8, col: u8) -> Self {
        Self::new(Family::Beta, row, col)
    }

    pub fn gamma(row: u8, col: u8) -> Self {
        Self::new(Family::Gamma, row, col)
    }

    pub fn b(row: u8, col: u8) -> Self {
        Self::new(Family::B, row, col)
    }

    pub fn c(row: u8, col: u8) -> Self {
        Self::new(Family::C, row, col)
    }

    pub fn is_odd(&self) -> bool {
        self.family.is_odd()
    }

    /// Every free generator is primary of weight 1/2.
    pub fn weight(&self) -> Rational {
        Rational::new(1, 2)
    }

    /// Coefficient of `(z-w)^{-1}` in `self(z) other(w)`.
    ///
    /// `beta gamma ~ 1`, `gamma beta ~ -1`, `b c ~ 1`, `c b ~ 1`; all other
    /// pairs are regular.
    pub fn contraction(&self, other: &Symbol) -> i64 {
        if self.row != other.row || self.col != other.col {
            return 0;
        }
        match (self.family, other.family) {
            (Family::Beta, Family::Gamma) => 1,
            (Family::Gamma, Family::Beta) => -1,
            (Family::B, Family::C) | (Family::C, Family::B) => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}]", self.family.name(), self.row, self.col)
    }
}

/// `d^order(symbol)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub symbol: Symbol,
    pub order: u16,
}

impl Factor {
    pub const fn new(symbol: Symbol, order: u16) -> Self {
        Factor { symbol, order }
    }

    pub fn is_odd(&self) -> bool {
        self.symbol.is_odd()
    }

    pub fn weight(&self) -> Rational {
        self.symbol.weight() + Rational::from_int(self.order as i64)
    }

    pub fn derive(&self) -> Factor {
        Factor::new(self.symbol, self.order + 1)
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == 0 {
            write!(f, "{}", self.symbol)
        } else {
            write!(f, "d^{}({})", self.order, self.symbol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_family_order() {
        assert!(Family::Beta < Family::Gamma);
        assert!(Family::Gamma < Family::B);
        assert!(Family::B < Family::C);
        let a = Factor::new(Symbol::beta(2, 1), 0);
        let b = Factor::new(Symbol::gamma(1, 1), 3);
        assert!(a < b);
        assert!(Factor::new(Symbol::beta(1, 1), 0) < Factor::new(Symbol::beta(1, 1), 1));
    }

    #[test]
    fn contraction_table_symmetry() {
        let syms = [
            Symbol::beta(1, 2),
            Symbol::gamma(1, 2),
            Symbol::b(1, 2),
            Symbol::c(1, 2),
            Symbol::gamma(2, 1),
        ];
        for x in &syms {
            for y in &syms {
                let sign = if x.is_odd() && y.is_odd() { 1 } else { -1 };
                assert_eq!(x.contraction(y), sign * y.contraction(x), "{x} {y}");
            }
        }
        assert_eq!(Symbol::beta(1, 2).contraction(&Symbol::gamma(2, 1)), 0);
    }
}
