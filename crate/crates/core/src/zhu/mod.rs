//! Zhu reduction to invariant differential operators on `n x n` matrices,
//! the relation polynomials `P`, `Q` and finite-dimensional modules.

mod classify;
mod poly;
mod project;
mod weyl;

pub use classify::{
    classify_family, classify_modules, mat_mul, verma_action, Exclusion, Letter, Matrix, ModuleFamily, VermaModule,
    VermaReport,
};
pub use poly::{c, default_name, family_name, parse_poly, Poly, PolyMonomial, Var, A, I, M};
pub use project::{zhu_star, ZhuGrading, ZhuProjector};
pub use weyl::{WeylElement, WeylMonomial};

use crate::kernel::linalg::{Echelon, SparseVec};
use crate::kernel::Rational;
use crate::models::{build_model, ModelError, ModelKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZhuError {
    #[error("the Zhu map is defined on the bosonic system only")]
    Fermionic,
    #[error("field uses an index outside the Weyl algebra rank")]
    RankMismatch,
    #[error("field is not homogeneous for the chosen grading")]
    Inhomogeneous,
    #[error("no relation data for n = {0}; supported: 2, 3, 4")]
    Unsupported(u8),
    #[error("product is not a polynomial in c_1..c_n")]
    NotInSpan,
    #[error("module conditions cannot be solved: {0}")]
    Unsolvable(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Images of the strong generators: `d`, `d'` and `c_1 .. c_n` (`c[0]` is `c_1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub n: u8,
    pub d: WeylElement,
    pub d_prime: WeylElement,
    pub c: Vec<WeylElement>,
}

pub fn invariants(n: u8, grading: ZhuGrading) -> Result<Invariants, ZhuError> {
    if !(2..=4).contains(&n) {
        return Err(ZhuError::Unsupported(n));
    }
    let m = build_model(n, ModelKind::Bg)?;
    let mut z = ZhuProjector::new(n, grading);
    let d = z.project(&m.generator("D")?)?;
    let d_prime = z.project(&m.generator("D'")?)?;
    let c = (1..=n)
        .map(|i| z.project(&m.casimir_field(i)?))
        .collect::<Result<Vec<_>, ZhuError>>()?;
    Ok(Invariants { n, d, d_prime, c })
}

/// Exponent vectors `alpha` with `sum i alpha_i <= n`.
fn c_monomials(n: u8) -> Vec<Vec<u16>> {
    fn go(i: u8, n: u8, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if i > n {
            out.push(cur.clone());
            return;
        }
        let mut e = 0u16;
        while e as u32 * i as u32 <= left {
            cur.push(e);
            go(i + 1, n, left - e as u32 * i as u32, cur, out);
            cur.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    go(1, n, n as u32, &mut Vec::new(), &mut out);
    out
}

fn c_poly_monomial(alpha: &[u16]) -> PolyMonomial {
    let mut p = Poly::int(1);
    for (k, &e) in alpha.iter().enumerate() {
        p = p.mul(&Poly::var(c(k as u8 + 1)).pow(e as u32));
    }
    let m = p.terms().next().expect("monomial").0.clone();
    m
}

/// Evaluates a polynomial in `c_1..c_n` on the Weyl images.
pub fn evaluate_on(inv: &Invariants, p: &Poly) -> WeylElement {
    let mut out = WeylElement::zero(inv.n);
    for (m, coef) in p.terms() {
        let mut t = WeylElement::scalar(inv.n, coef.clone());
        for &(v, e) in m.powers() {
            t = t.mul(&inv.c[v as usize - 1].pow(e as u32));
        }
        out.add_scaled(&t, &Rational::one());
    }
    out
}

fn weyl_vec(w: &WeylElement) -> SparseVec<WeylMonomial> {
    w.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

/// Writes `w` as a polynomial in `c_1..c_n` of weighted degree at most `n`.
pub fn express_in_c(inv: &Invariants, w: &WeylElement) -> Result<Poly, ZhuError> {
    let alphas = c_monomials(inv.n);
    let mut ech: Echelon<WeylMonomial> = Echelon::new();
    for (k, alpha) in alphas.iter().enumerate() {
        let mut mono = Poly::zero();
        mono.add_term(c_poly_monomial(alpha), Rational::one());
        ech.insert(weyl_vec(&evaluate_on(inv, &mono)), k);
    }
    let combo = ech.solve(weyl_vec(w)).ok_or(ZhuError::NotInSpan)?;
    let mut out = Poly::zero();
    for (k, coef) in combo {
        out.add_term(c_poly_monomial(&alphas[k]), coef);
    }
    if evaluate_on(inv, &out) != *w {
        return Err(ZhuError::NotInSpan);
    }
    Ok(out)
}

/// `P`, `Q` with `d d' + P(c) = 0` and `d' d + Q(c) = 0`.
pub fn compute_pq(n: u8, grading: ZhuGrading) -> Result<(Poly, Poly), ZhuError> {
    let inv = invariants(n, grading)?;
    compute_pq_from(&inv)
}

pub fn compute_pq_from(inv: &Invariants) -> Result<(Poly, Poly), ZhuError> {
    let minus = -Rational::one();
    let p = express_in_c(inv, &inv.d.mul(&inv.d_prime).scale(&minus))?;
    let q = express_in_c(inv, &inv.d_prime.mul(&inv.d).scale(&minus))?;
    Ok((p, q))
}

/// Terms of `p` of top weighted degree, `c_i` having degree `i`.
pub fn weighted_leading(p: &Poly) -> Poly {
    let wdeg = |m: &PolyMonomial| m.powers().iter().map(|&(v, e)| v as u32 * e as u32).sum::<u32>();
    let top = p.terms().map(|(m, _)| wdeg(m)).max().unwrap_or(0);
    let mut out = Poly::zero();
    for (m, coef) in p.terms() {
        if wdeg(m) == top {
            out.add_term(m.clone(), coef.clone());
        }
    }
    out
}

/// Elementary symmetric functions `E_0 .. E_n` from power sums `p_1 .. p_n`:
/// `E_m = (1/m) sum_{k=1}^m (-1)^{k-1} p_k E_{m-k}`.
pub fn elementary_from_power_sums(p: &[Poly]) -> Vec<Poly> {
    let mut e = vec![Poly::int(1)];
    for m in 1..=p.len() {
        let mut s = Poly::zero();
        for k in 1..=m {
            let t = p[k - 1].mul(&e[m - k]);
            if k % 2 == 1 {
                s += &t;
            } else {
                s -= &t;
            }
        }
        e.push(s.scale(&Rational::from_int(m as i64).recip()));
    }
    e
}

/// The determinant `E_n` of an `n x n` matrix from `p_k = tr X^k`.
pub fn newton_girard(p: &[Rational]) -> Rational {
    let polys: Vec<Poly> = p.iter().map(|x| Poly::constant(x.clone())).collect();
    elementary_from_power_sums(&polys)
        .pop()
        .and_then(|e| e.as_constant())
        .expect("constant power sums give a constant")
}

/// The literal reading `E_m = -((-1)^m / m) sum_k tr(X^k) E_{m-k}`; kept
/// for the sign-convention check.
pub fn newton_girard_literal(p: &[Rational]) -> Rational {
    let mut e = vec![Rational::one()];
    for m in 1..=p.len() {
        let mut s = Rational::zero();
        for k in 1..=m {
            s += &(&p[k - 1] * &e[m - k]);
        }
        let sign = if m % 2 == 0 { -Rational::one() } else { Rational::one() };
        e.push(sign * s / Rational::from_int(m as i64));
    }
    e.pop().expect("nonempty")
}

fn x_var(n: u8, i: u8, j: u8) -> Var {
    100 + ((i - 1) * n + (j - 1)) as Var
}

fn xi_var(n: u8, i: u8, j: u8) -> Var {
    200 + ((i - 1) * n + (j - 1)) as Var
}

/// Principal symbol: `x'_{ij}` and `d_{ij}` become commuting variables.
pub fn symbol(w: &WeylElement) -> Poly {
    let n = w.rank();
    let mut out = Poly::zero();
    for (m, coef) in w.terms() {
        let mut t = Poly::constant(coef.clone());
        for v in 0..m.x.len() {
            let (i, j) = ((v / n as usize) as u8 + 1, (v % n as usize) as u8 + 1);
            t = t.mul(&Poly::var(x_var(n, i, j)).pow(m.x[v] as u32));
            t = t.mul(&Poly::var(xi_var(n, i, j)).pow(m.d[v] as u32));
        }
        out += &t;
    }
    out
}

/// `-det X` for `X = x' xi^T`, computed by Newton-Girard from `tr X^k`.
pub fn graded_relation_symbol(n: u8) -> Poly {
    let size = n as usize;
    let mut x = vec![vec![Poly::zero(); size]; size];
    for a in 1..=n {
        for b in 1..=n {
            let mut s = Poly::zero();
            for k in 1..=n {
                s += &Poly::var(x_var(n, a, k)).mul(&Poly::var(xi_var(n, b, k)));
            }
            x[a as usize - 1][b as usize - 1] = s;
        }
    }
    let mut power = x.clone();
    let mut traces = Vec::new();
    for step in 1..=size {
        if step > 1 {
            let mut next = vec![vec![Poly::zero(); size]; size];
            for i in 0..size {
                for j in 0..size {
                    for k in 0..size {
                        next[i][j] += &power[i][k].mul(&x[k][j]);
                    }
                }
            }
            power = next;
        }
        let mut t = Poly::zero();
        for (i, row) in power.iter().enumerate() {
            t += &row[i];
        }
        traces.push(t);
    }
    let e = elementary_from_power_sums(&traces);
    e[size].scale(&-Rational::one())
}

/// Whether the top weighted parts of `P` and `Q` agree and, under the
/// principal symbol, equal `-det(x' xi^T)`.
pub fn leading_symbol_check(inv: &Invariants, p: &Poly, q: &Poly) -> bool {
    let top = weighted_leading(p);
    if top != weighted_leading(q) {
        return false;
    }
    let mut s = top;
    for (k, ck) in inv.c.iter().enumerate() {
        s = s.substitute(c(k as u8 + 1), &symbol(&ck.leading_part()));
    }
    s == graded_relation_symbol(inv.n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_monomial_enumeration() {
        // 1, c1, c1^2, c2
        assert_eq!(c_monomials(2).len(), 4);
        assert_eq!(c_monomials(4).len(), 12);
    }

    #[test]
    fn sl2_relations() {
        let inv = invariants(2, ZhuGrading::Integral).unwrap();
        let (p, q) = compute_pq_from(&inv).unwrap();
        assert_eq!(p, parse_poly("1/2*c2 - 1/4*c1^2 - 3/2*c1 - 2").unwrap());
        assert_eq!(q, parse_poly("1/2*c2 - 1/4*c1^2 - 1/2*c1").unwrap());
        assert!(leading_symbol_check(&inv, &p, &q));
        // [d, d'] = c1 + 2
        let mut want = inv.c[0].clone();
        want.add_scaled(&WeylElement::one(2), &Rational::from_int(2));
        assert_eq!(inv.d.commutator(&inv.d_prime), want);
    }

    #[test]
    fn newton_girard_small() {
        let r = |v: i64| Rational::from_int(v);
        assert_eq!(newton_girard(&[r(2), r(2)]), r(1));
        assert_eq!(newton_girard(&[r(3), r(5)]), r(2));
        assert_ne!(newton_girard_literal(&[r(2), r(2)]), r(1));
    }
}
