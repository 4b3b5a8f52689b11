//! Text syntax for field expressions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*          at most one non-scalar factor
//! unary   := '-' unary | primary
//! primary := rational | atom | 'd^' int '(' expr ')' | 'NO(' expr (',' expr)* ')'
//!          | '(' expr ')'
//! atom    := name ('[' int (',' int)* ']')?
//! ```
//!
//! `NO(f1, ..., fk)` is the right-nested normal ordering. `#` starts a
//! comment that runs to the end of the line.

mod parser;
mod render;

pub use parser::{parse_ast, Ast};
pub(crate) use render::join_terms;
pub use render::{render, render_rational};

use crate::kernel::{FieldExpr, Rational, Symbol};
use crate::ope::normal_order;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("syntax error at byte {pos}: expected {expected}, found {found}")]
    Unexpected { pos: usize, expected: String, found: String },
    #[error("unknown atom {0}")]
    UnknownAtom(String),
    #[error("atom {atom} has an index outside 1..={rank}")]
    IndexOutOfRank { atom: String, rank: u8 },
    #[error("product of two non-scalar expressions at byte {0}; use NO(..)")]
    NonScalarProduct(usize),
    #[error("{0}")]
    Model(String),
}

/// Maps atom names (with indices) to fields.
pub trait AtomResolver {
    fn rank(&self) -> u8;
    fn resolve(&self, name: &str, indices: &[u8]) -> Result<FieldExpr, SyntaxError>;
}

/// Resolves only the free generators `beta`, `gamma`, `b`, `c`.
#[derive(Debug, Clone, Copy)]
pub struct FreeResolver {
    pub rank: u8,
}

impl AtomResolver for FreeResolver {
    fn rank(&self) -> u8 {
        self.rank
    }

    fn resolve(&self, name: &str, idx: &[u8]) -> Result<FieldExpr, SyntaxError> {
        let fam = crate::kernel::Family::from_name(name).ok_or_else(|| SyntaxError::UnknownAtom(name.into()))?;
        if idx.len() != 2 {
            return Err(SyntaxError::UnknownAtom(name.into()));
        }
        if idx.iter().any(|&i| i == 0 || i > self.rank) {
            return Err(SyntaxError::IndexOutOfRank { atom: format!("{name}[{},{}]", idx[0], idx[1]), rank: self.rank });
        }
        Ok(FieldExpr::generator(Symbol::new(fam, idx[0], idx[1])))
    }
}

impl Ast {
    /// Expands the tree into a canonical free-field expression.
    pub fn eval(&self, r: &dyn AtomResolver) -> Result<FieldExpr, SyntaxError> {
        Ok(match self {
            Ast::Num(q) => FieldExpr::scalar(q.clone()),
            Ast::Atom { name, indices } => r.resolve(name, indices)?,
            Ast::Deriv(k, e) => e.eval(r)?.nth_derivative(*k),
            Ast::No(items) => {
                let fields = items.iter().map(|a| a.eval(r)).collect::<Result<Vec<_>, _>>()?;
                normal_order(&fields)
            }
            Ast::Neg(e) => -e.eval(r)?,
            Ast::Sum(items) => {
                let mut out = FieldExpr::zero();
                for a in items {
                    out += &a.eval(r)?;
                }
                out
            }
            Ast::Scale(c, e) => e.eval(r)?.scale(c),
        })
    }
}

/// Parses and expands `text`.
pub fn parse(text: &str, r: &dyn AtomResolver) -> Result<FieldExpr, SyntaxError> {
    parse_ast(text)?.eval(r)
}

/// Splits an expression into its top-level summands with their scalar
/// coefficients; used for single-coefficient perturbations.
pub fn top_level_terms(ast: &Ast) -> Vec<(Rational, Ast)> {
    fn go(a: &Ast, c: Rational, out: &mut Vec<(Rational, Ast)>) {
        match a {
            Ast::Sum(items) => {
                for x in items {
                    go(x, c.clone(), out);
                }
            }
            Ast::Neg(x) => go(x, -c, out),
            Ast::Scale(k, x) => go(x, c * k, out),
            Ast::Num(q) => out.push((c * q, Ast::Num(Rational::one()))),
            other => out.push((c, other.clone())),
        }
    }
    let mut out = Vec::new();
    go(ast, Rational::one(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_generators() {
        let r = FreeResolver { rank: 2 };
        let e = parse("NO(beta[1,1], gamma[1,1])", &r).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.degree(), Some(2));
        let two = parse("2 + 0 * beta[1,2]", &r).unwrap();
        assert_eq!(two, FieldExpr::scalar(Rational::from_int(2)));
        assert!(matches!(parse("beta[3,1]", &r), Err(SyntaxError::IndexOutOfRank { .. })));
        assert!(matches!(parse("beta[1,1] * gamma[1,1]", &r), Err(SyntaxError::NonScalarProduct(_))));
        assert!(matches!(parse("beta[1,1] +", &r), Err(SyntaxError::Unexpected { .. })));
        assert!(matches!(parse("zeta[1,1]", &r), Err(SyntaxError::UnknownAtom(_))));
    }

    #[test]
    fn terms_and_coefficients() {
        let ast = parse_ast("NO(D, D') + 1/2*C[2] - 1/4*NO(C[1], C[1]) - 1/2*d^1(C[1]) # comment").unwrap();
        let t = top_level_terms(&ast);
        assert_eq!(t.len(), 4);
        assert_eq!(t[1].0, Rational::new(1, 2));
        assert_eq!(t[2].0, Rational::new(-1, 4));
        assert_eq!(t[3].0, Rational::new(-1, 2));
    }
}
