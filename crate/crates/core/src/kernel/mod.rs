//! Exact scalars, generator symbols, canonical monomials and gradings.

mod expr;
pub mod linalg;
mod rational;
mod symbol;

pub use expr::{sort_signed, FactorVec, FieldExpr, Monomial};
pub use rational::{ParseRationalError, Rational};
pub use symbol::{Factor, Family, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("symbol {symbol} has an index outside 1..={rank}")]
    IndexOutOfRank { symbol: Symbol, rank: u8 },
    #[error("inhomogeneous weight: found both {first} and {second}")]
    InhomogeneousWeight { first: Rational, second: Rational },
    #[error("inhomogeneous fermionic charge: found both {first} and {second}")]
    InhomogeneousCharge { first: i64, second: i64 },
}
