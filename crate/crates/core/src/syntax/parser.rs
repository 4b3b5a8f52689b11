//! Recursive-descent parser producing an [`Ast`].

use crate::kernel::Rational;

use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ast {
    Num(Rational),
    Atom { name: String, indices: Vec<u8> },
    Deriv(u32, Box<Ast>),
    No(Vec<Ast>),
    Neg(Box<Ast>),
    Sum(Vec<Ast>),
    Scale(Rational, Box<Ast>),
}

impl Ast {
    /// The value if the subtree is a pure scalar literal expression.
    fn as_scalar(&self) -> Option<Rational> {
        match self {
            Ast::Num(q) => Some(q.clone()),
            Ast::Neg(e) => e.as_scalar().map(|q| -q),
            Ast::Scale(c, e) => e.as_scalar().map(|q| c * &q),
            Ast::Sum(items) => {
                let mut s = Rational::zero();
                for x in items {
                    s += &x.as_scalar()?;
                }
                Some(s)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(i) => format!("integer {i}"),
        Tok::Name(s) => format!("name {s}"),
        Tok::End => "end of input".into(),
        other => format!("{other:?}"),
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let v = src[start..i].parse::<u64>().map_err(|_| SyntaxError::Unexpected {
                    pos: start,
                    expected: "an integer that fits in 64 bits".into(),
                    found: src[start..i].into(),
                })?;
                out.push((start, Tok::Int(v)));
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                // Suffixes that belong to a name: D', and E+/E-/F+/F-/B+/B- before '['.
                let prime = i < bytes.len() && bytes[i] == b'\'';
                let signed = i + 1 < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i + 1] == b'[';
                if prime || signed {
                    i += 1;
                }
                out.push((start, Tok::Name(src[start..i].to_string())));
            }
            _ => {
                let t = match ch {
                    b'+' => Tok::Plus,
                    b'-' => Tok::Minus,
                    b'*' => Tok::Star,
                    b'/' => Tok::Slash,
                    b'^' => Tok::Caret,
                    b',' => Tok::Comma,
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    b'[' => Tok::LBracket,
                    b']' => Tok::RBracket,
                    _ => {
                        return Err(SyntaxError::Unexpected {
                            pos: i,
                            expected: "a token".into(),
                            found: src[i..].chars().next().map(String::from).unwrap_or_default(),
                        })
                    }
                };
                out.push((i, t));
                i += 1;
            }
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, SyntaxError> {
        Err(SyntaxError::Unexpected { pos: self.offset(), expected: expected.into(), found: describe(self.peek()) })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn int(&mut self) -> Result<u64, SyntaxError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(v)
            }
            _ => self.fail("an integer"),
        }
    }

    fn expr(&mut self) -> Result<Ast, SyntaxError> {
        let mut items = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    items.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    items.push(Ast::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Ast::Sum(items) })
    }

    fn term(&mut self) -> Result<Ast, SyntaxError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            let at = self.offset();
            self.bump();
            let rhs = self.unary()?;
            acc = match (acc.as_scalar(), rhs.as_scalar()) {
                (Some(c), _) => Ast::Scale(c, Box::new(rhs)),
                (None, Some(c)) => Ast::Scale(c, Box::new(acc)),
                (None, None) => return Err(SyntaxError::NonScalarProduct(at)),
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Ast, SyntaxError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Ast, SyntaxError> {
        match self.peek().clone() {
            Tok::Int(_) => {
                let num = self.int()?;
                let mut q = Rational::from_big(num_rational::BigRational::from_integer(num.into()));
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let at = self.offset();
                    let den = self.int()?;
                    if den == 0 {
                        return Err(SyntaxError::Unexpected { pos: at, expected: "a nonzero denominator".into(), found: "0".into() });
                    }
                    q = q / Rational::from_big(num_rational::BigRational::from_integer(den.into()));
                }
                Ok(Ast::Num(q))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Name(name) => {
                self.bump();
                if name == "d" && *self.peek() == Tok::Caret {
                    self.bump();
                    let k = self.int()?;
                    self.expect(Tok::LParen, "'(' after d^k")?;
                    let e = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    return Ok(Ast::Deriv(k as u32, Box::new(e)));
                }
                if name == "NO" && *self.peek() == Tok::LParen {
                    self.bump();
                    let mut items = vec![self.expr()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        items.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "')' or ','")?;
                    return Ok(Ast::No(items));
                }
                let mut indices = Vec::new();
                if *self.peek() == Tok::LBracket {
                    self.bump();
                    loop {
                        let at = self.offset();
                        let v = self.int()?;
                        let v = u8::try_from(v).map_err(|_| SyntaxError::IndexOutOfRank {
                            atom: name.clone(),
                            rank: u8::MAX,
                        });
                        let v = v.map_err(|e| match e {
                            SyntaxError::IndexOutOfRank { atom, rank } => SyntaxError::IndexOutOfRank { atom: format!("{atom}@{at}"), rank },
                            other => other,
                        })?;
                        indices.push(v);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::RBracket, "']'")?;
                }
                Ok(Ast::Atom { name, indices })
            }
            _ => self.fail("a number, atom, d^k(..), NO(..) or '('"),
        }
    }
}

/// Parses text into a syntax tree without resolving atoms.
pub fn parse_ast(src: &str) -> Result<Ast, SyntaxError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("an operator or end of input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_with_suffixes() {
        let a = parse_ast("E+[1,2] - F-[2,1] + D' - D").unwrap();
        let Ast::Sum(items) = a else { panic!() };
        assert_eq!(items[0], Ast::Atom { name: "E+".into(), indices: vec![1, 2] });
        assert_eq!(items[1], Ast::Neg(Box::new(Ast::Atom { name: "F-".into(), indices: vec![2, 1] })));
        assert_eq!(items[2], Ast::Atom { name: "D'".into(), indices: vec![] });
    }

    #[test]
    fn rationals_and_errors() {
        assert_eq!(parse_ast("-3/32").unwrap(), Ast::Neg(Box::new(Ast::Num(Rational::new(3, 32)))));
        let err = parse_ast("NO(D, ").unwrap_err();
        assert!(matches!(err, SyntaxError::Unexpected { pos: 6, .. }), "{err:?}");
        assert!(parse_ast("1/0").is_err());
        assert!(parse_ast("d^2 beta[1,1]").is_err());
    }
}
