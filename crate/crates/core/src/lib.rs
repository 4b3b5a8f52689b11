//! Exact symbolic engine for free-field vertex algebras.

pub mod commutant;
pub mod fixtures;
pub mod fock;
pub mod kernel;
pub mod models;
pub mod ope;
pub mod syntax;
pub mod zhu;

pub use kernel::{Factor, Family, FieldExpr, KernelError, Monomial, Rational, Symbol};
