//! Deterministic text form of canonical expressions.

use crate::kernel::{Factor, FieldExpr, Monomial, Rational};

pub fn render_rational(q: &Rational) -> String {
    q.to_string()
}

fn render_factor(f: &Factor) -> String {
    if f.order == 0 {
        f.symbol.to_string()
    } else {
        format!("d^{}({})", f.order, f.symbol)
    }
}

fn render_monomial(m: &Monomial) -> Option<String> {
    match m.factors() {
        [] => None,
        [f] => Some(render_factor(f)),
        fs => Some(format!("NO({})", fs.iter().map(render_factor).collect::<Vec<_>>().join(", "))),
    }
}

/// Joins `(coefficient, body)` pairs; a `None` body is the unit.
pub(crate) fn join_terms<I: IntoIterator<Item = (Rational, Option<String>)>>(terms: I) -> String {
    let mut out = String::new();
    for (i, (c, body)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        match body {
            None => out.push_str(&a.to_string()),
            Some(b) if a.is_one() => out.push_str(&b),
            Some(b) => {
                out.push_str(&a.to_string());
                out.push('*');
                out.push_str(&b);
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Renders a canonical expression; `parse` inverts it.
pub fn render(e: &FieldExpr) -> String {
    join_terms(e.terms().map(|(m, c)| (c.clone(), render_monomial(m))))
}

#[cfg(test)]
mod tests {
    use super::super::{parse, FreeResolver};
    use super::*;
    use crate::kernel::Symbol;

    #[test]
    fn basic_forms() {
        assert_eq!(render(&FieldExpr::zero()), "0");
        assert_eq!(render(&FieldExpr::generator(Symbol::beta(1, 1)).derivative()), "d^1(beta[1,1])");
        let e = parse("-1/2*NO(gamma[2,1], beta[1,2]) + 3 - b[1,1]", &FreeResolver { rank: 2 }).unwrap();
        let text = render(&e);
        assert_eq!(text, "3 - 1/2*NO(beta[1,2], gamma[2,1]) - b[1,1]");
        assert_eq!(parse(&text, &FreeResolver { rank: 2 }).unwrap(), e);
    }
}
