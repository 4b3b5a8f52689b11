//! Finite-dimensional irreducible modules over the invariant Weyl algebra,
//! built on `d^k v` for a vector `v` killed by `d'`.

use std::collections::BTreeMap;
use std::fmt;

use crate::kernel::Rational;

use super::poly::{c, family_name, Poly, Var, A, I, M};
use super::{compute_pq, ZhuError, ZhuGrading};

/// `a != ...` style inequation at one `i`, with the excluded point when
/// the condition is affine in a free parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exclusion {
    /// Either the symbol `i` or a constant in `2..=m`.
    pub i: Poly,
    /// Must be nonzero for the module to be irreducible.
    pub condition: Poly,
    /// Excluded values of the free and solved parameters, if isolated.
    pub point: Option<Vec<(Var, Poly)>>,
}

/// Solutions of `P(a, l) = 0`, `Q(a - n(m-1), l) = 0`, with `c_1 -> a` and
/// `c_i -> l_i` (`i >= 2`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleFamily {
    pub n: u8,
    /// The dimension: the symbol `m` or a constant.
    pub m: Poly,
    pub p: Poly,
    pub q: Poly,
    pub solved: Vec<(Var, Poly)>,
    pub free: Vec<Var>,
    pub exclusions: Vec<Exclusion>,
}

fn neg(p: &Poly) -> Poly {
    p.scale(&-Rational::one())
}

/// `a - n (m - k)`.
fn shifted(n: u8, m: &Poly, k: &Poly) -> Poly {
    let mut t = m.clone();
    t -= k;
    let mut out = Poly::var(A);
    out -= &t.scale(&Rational::from_int(n as i64));
    out
}

fn substitute_all(p: &Poly, values: &[(Var, Poly)]) -> Poly {
    values.iter().fold(p.clone(), |acc, (v, x)| acc.substitute(*v, x))
}

fn free_params(n: u8) -> Vec<Var> {
    match n {
        2 => Vec::new(),
        _ => std::iter::once(A).chain((2..n - 1).map(c)).collect(),
    }
}

/// The symbolic family in `m`, with one exclusion in the symbol `i`.
pub fn classify_family(n: u8) -> Result<ModuleFamily, ZhuError> {
    let (p, q) = compute_pq(n, ZhuGrading::Integral)?;
    solve_family(n, p, q)
}

pub(crate) fn solve_family(n: u8, p: Poly, q: Poly) -> Result<ModuleFamily, ZhuError> {
    let m = Poly::var(M);
    let pa = p.substitute(c(1), &Poly::var(A));
    let qtop = q.substitute(c(1), &shifted(n, &m, &Poly::int(1)));
    // Eliminate u1 through the combination in which it cancels; the rest is
    // affine in u2.
    let u1 = c(n);
    let u2 = if n == 2 { A } else { c(n - 1) };
    let unsolvable = |what: &str| ZhuError::Unsolvable(what.to_string());
    let (p1, p0) = pa.split_linear(u1).ok_or_else(|| unsolvable("P is not affine in its top Casimir"))?;
    let (q1, _) = qtop.split_linear(u1).ok_or_else(|| unsolvable("Q is not affine in its top Casimir"))?;
    let mut resultant = q1.mul(&pa);
    resultant -= &p1.mul(&qtop);
    let (alpha, beta) = resultant.split_linear(u2).ok_or_else(|| unsolvable("eliminant is not affine"))?;
    if alpha.is_zero() {
        return Err(unsolvable("eliminant does not involve the solved parameter"));
    }
    let v2 = neg(&beta.exact_div(&alpha).ok_or_else(|| unsolvable("eliminant has no polynomial root"))?);
    let v1 = neg(
        &p0.substitute(u2, &v2)
            .exact_div(&p1.substitute(u2, &v2))
            .ok_or_else(|| unsolvable("top Casimir has no polynomial solution"))?,
    );
    let solved = vec![(u2, v2), (u1, v1)];
    let free = free_params(n);
    let condition = substitute_all(&q.substitute(c(1), &shifted(n, &m, &Poly::var(I))), &solved);
    let exclusion = Exclusion { i: Poly::var(I), point: excluded_point(&condition, &free, &solved), condition };
    Ok(ModuleFamily { n, m, p, q, solved, free, exclusions: vec![exclusion] })
}

/// Solves `condition = 0` for the first free parameter it is affine in.
fn excluded_point(condition: &Poly, free: &[Var], solved: &[(Var, Poly)]) -> Option<Vec<(Var, Poly)>> {
    for &v in free {
        let Some((alpha, beta)) = condition.split_linear(v) else { continue };
        if alpha.is_zero() {
            continue;
        }
        let Some(root) = beta.exact_div(&alpha) else { continue };
        let root = neg(&root);
        let mut point = vec![(v, root.clone())];
        for (w, x) in solved {
            point.push((*w, x.substitute(v, &root)));
        }
        return Some(point);
    }
    None
}

impl ModuleFamily {
    /// The family at a fixed dimension `m >= 1`, with one exclusion for each
    /// `i = 2..=m` that is not identically nonzero.
    pub fn at_dim(&self, m: u32) -> ModuleFamily {
        let mv = Poly::int(m as i64);
        let at = |p: &Poly| p.substitute(M, &mv);
        let solved: Vec<(Var, Poly)> = self.solved.iter().map(|(v, x)| (*v, at(x))).collect();
        let symbolic = &self.exclusions[0];
        let mut exclusions = Vec::new();
        for i in 2..=m {
            let iv = Poly::int(i as i64);
            let condition = at(&symbolic.condition.substitute(I, &iv));
            if condition.as_constant().is_some_and(|k| !k.is_zero()) {
                continue;
            }
            let point = excluded_point(&condition, &self.free, &solved);
            exclusions.push(Exclusion { i: iv, condition, point });
        }
        ModuleFamily { n: self.n, m: mv, p: self.p.clone(), q: self.q.clone(), solved, free: self.free.clone(), exclusions }
    }

    /// The symbolic exclusion specialized to one `i`, keeping `m` symbolic.
    pub fn exclusion_at(&self, i: u32) -> Exclusion {
        let iv = Poly::int(i as i64);
        let condition = self.exclusions[0].condition.substitute(I, &iv);
        let solved: Vec<(Var, Poly)> = self.solved.iter().map(|(v, x)| (*v, x.substitute(I, &iv))).collect();
        let point = excluded_point(&condition, &self.free, &solved);
        Exclusion { i: iv, condition, point }
    }

    pub fn solved_value(&self, v: Var) -> Option<&Poly> {
        self.solved.iter().find(|(w, _)| *w == v).map(|(_, x)| x)
    }

    /// Values of `a, l_2 .. l_n` at a choice of the free parameters.
    pub fn instantiate(&self, free_values: &BTreeMap<Var, Rational>) -> Option<(Rational, Vec<Rational>)> {
        let get = |v: Var| -> Option<Rational> {
            if let Some(x) = free_values.get(&v) {
                return Some(x.clone());
            }
            self.solved_value(v)?.evaluate(free_values)
        };
        let a = get(A)?;
        let lambda = (2..=self.n).map(|i| get(c(i))).collect::<Option<Vec<_>>>()?;
        Some((a, lambda))
    }
}

impl fmt::Display for ModuleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = family_name;
        writeln!(f, "n = {}, m = {}", self.n, self.m.render(&name))?;
        for (v, x) in &self.solved {
            writeln!(f, "  {} = {}", name(*v), x.render(&name))?;
        }
        let free: Vec<String> = self.free.iter().map(|v| name(*v)).collect();
        writeln!(f, "  free: {}", if free.is_empty() { "none".to_string() } else { free.join(", ") })?;
        for e in &self.exclusions {
            write!(f, "  i = {}: {} != 0", e.i.render(&name), e.condition.render(&name))?;
            if let Some(point) = &e.point {
                let parts: Vec<String> = point.iter().map(|(v, x)| format!("{} = {}", name(*v), x.render(&name))).collect();
                write!(f, " (excludes {})", parts.join(", "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `classify_family(n)` at dimension `m`.
pub fn classify_modules(n: u8, m: u32) -> Result<ModuleFamily, ZhuError> {
    Ok(classify_family(n)?.at_dim(m))
}

/// A letter of a word in the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    D,
    DPrime,
    /// `c_i`, `i >= 1`.
    C(u8),
}

impl std::str::FromStr for Letter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "d" => Ok(Letter::D),
            "d'" => Ok(Letter::DPrime),
            _ => s
                .strip_prefix('c')
                .and_then(|i| i.parse::<u8>().ok())
                .filter(|&i| i >= 1)
                .map(Letter::C)
                .ok_or_else(|| format!("unknown letter {s:?}; expected d, d' or c<i>")),
        }
    }
}

pub type Matrix = Vec<Vec<Rational>>;

/// The module spanned by `e_k = d^k v`, `k < m`, truncated at `d^m v = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VermaReport {
    pub n: u8,
    pub dim: usize,
    pub a: Rational,
    pub lambda: Vec<Rational>,
    /// The word acting on the basis, rows indexing the output.
    pub matrix: Matrix,
    /// `Q(a - n(k-1), l)` for `k = 1..m-1`: `d' d = -Q` on `e_{k-1}`.
    pub dd_scalars: Vec<Rational>,
    /// `Q(a - n(m-1), l) = 0`, so `d^m v = 0` is consistent.
    pub top_singular: bool,
    /// `P(a, l) = 0`, so `d d' v = 0` is consistent.
    pub bottom_singular: bool,
    /// The `i` in `2..=m` with `Q(a - n(m-i), l) = 0`.
    pub violated: Vec<u32>,
}

impl VermaReport {
    pub fn irreducible(&self) -> bool {
        self.top_singular && self.bottom_singular && self.violated.is_empty()
    }
}

fn zero_matrix(m: usize) -> Matrix {
    vec![vec![Rational::zero(); m]; m]
}

pub fn mat_mul(x: &Matrix, y: &Matrix) -> Matrix {
    let m = x.len();
    let mut out = zero_matrix(m);
    for i in 0..m {
        for k in 0..m {
            if x[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &(&x[i][k] * &y[k][j]);
            }
        }
    }
    out
}

/// Evaluation point for a relation polynomial with `c_1 -> x`.
fn point(x: &Rational, lambda: &[Rational]) -> BTreeMap<Var, Rational> {
    let mut p = BTreeMap::new();
    p.insert(c(1), x.clone());
    for (k, l) in lambda.iter().enumerate() {
        p.insert(c(k as u8 + 2), l.clone());
    }
    p
}

/// Matrices of `d`, `d'`, `c_1 .. c_n` on the `m`-dimensional truncation.
#[derive(Debug, Clone)]
pub struct VermaModule {
    pub n: u8,
    pub a: Rational,
    pub lambda: Vec<Rational>,
    pub p: Poly,
    pub q: Poly,
    pub dim: usize,
}

impl VermaModule {
    pub fn new(n: u8, dim: usize, a: Rational, lambda: Vec<Rational>) -> Result<Self, ZhuError> {
        if lambda.len() != n as usize - 1 {
            return Err(ZhuError::Unsolvable(format!("expected {} eigenvalues l_2..l_n", n - 1)));
        }
        if dim == 0 {
            return Err(ZhuError::Unsolvable("dimension must be positive".into()));
        }
        let (p, q) = compute_pq(n, ZhuGrading::Integral)?;
        Ok(VermaModule { n, a, lambda, p, q, dim })
    }

    /// `c_1` eigenvalue `a - k n` on `e_k`.
    pub fn c1_eigenvalue(&self, k: usize) -> Rational {
        &self.a - &Rational::from_int(k as i64 * self.n as i64)
    }

    pub fn q_at(&self, x: &Rational) -> Rational {
        self.q.evaluate(&point(x, &self.lambda)).expect("all variables bound")
    }

    pub fn p_at(&self, x: &Rational) -> Rational {
        self.p.evaluate(&point(x, &self.lambda)).expect("all variables bound")
    }

    pub fn letter(&self, l: Letter) -> Result<Matrix, ZhuError> {
        let m = self.dim;
        let mut out = zero_matrix(m);
        match l {
            Letter::D => {
                for k in 0..m - 1 {
                    out[k + 1][k] = Rational::one();
                }
            }
            Letter::DPrime => {
                for k in 1..m {
                    out[k - 1][k] = -self.q_at(&self.c1_eigenvalue(k - 1));
                }
            }
            Letter::C(1) => {
                for (k, row) in out.iter_mut().enumerate() {
                    row[k] = self.c1_eigenvalue(k);
                }
            }
            Letter::C(i) if i <= self.n => {
                for (k, row) in out.iter_mut().enumerate() {
                    row[k] = self.lambda[i as usize - 2].clone();
                }
            }
            Letter::C(i) => return Err(ZhuError::Unsolvable(format!("c{i} is not a generator for n = {}", self.n))),
        }
        Ok(out)
    }

    /// The product `w_1 w_2 ... w_r`, acting right to left.
    pub fn word(&self, word: &[Letter]) -> Result<Matrix, ZhuError> {
        let mut out = zero_matrix(self.dim);
        for (k, row) in out.iter_mut().enumerate() {
            row[k] = Rational::one();
        }
        for l in word {
            out = mat_mul(&out, &self.letter(*l)?);
        }
        Ok(out)
    }

    /// `P(c)` and `Q(c)` as diagonal matrices.
    pub fn relation_matrices(&self) -> (Matrix, Matrix) {
        let mut p = zero_matrix(self.dim);
        let mut q = zero_matrix(self.dim);
        for k in 0..self.dim {
            let x = self.c1_eigenvalue(k);
            p[k][k] = self.p_at(&x);
            q[k][k] = self.q_at(&x);
        }
        (p, q)
    }

    /// Whether `d d' + P(c) = 0` and `d' d + Q(c) = 0` hold as matrices.
    pub fn relations_hold(&self) -> bool {
        let d = self.letter(Letter::D).expect("d");
        let dp = self.letter(Letter::DPrime).expect("d'");
        let (p, q) = self.relation_matrices();
        let is_neg = |x: &Matrix, y: &Matrix| x.iter().flatten().zip(y.iter().flatten()).all(|(u, v)| (u + v).is_zero());
        is_neg(&mat_mul(&d, &dp), &p) && is_neg(&mat_mul(&dp, &d), &q)
    }
}

/// Acts by `word` on the `m`-dimensional module with lowest `c_1` weight `a`
/// and central character `lambda = (l_2 .. l_n)`, and reports which module
/// conditions hold there.
pub fn verma_action(n: u8, dim: usize, a: Rational, lambda: Vec<Rational>, word: &[Letter]) -> Result<VermaReport, ZhuError> {
    let module = VermaModule::new(n, dim, a, lambda)?;
    let matrix = module.word(word)?;
    let dd_scalars: Vec<Rational> = (1..dim).map(|k| module.q_at(&module.c1_eigenvalue(k - 1))).collect();
    let top_singular = module.q_at(&module.c1_eigenvalue(dim - 1)).is_zero();
    let bottom_singular = module.p_at(&module.a).is_zero();
    let violated = (2..=dim as u32)
        .filter(|&i| module.q_at(&module.c1_eigenvalue(dim - i as usize)).is_zero())
        .collect();
    Ok(VermaReport {
        n,
        dim,
        a: module.a,
        lambda: module.lambda,
        matrix,
        dd_scalars,
        top_singular,
        bottom_singular,
        violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letters_parse() {
        assert_eq!("d'".parse::<Letter>(), Ok(Letter::DPrime));
        assert_eq!("c3".parse::<Letter>(), Ok(Letter::C(3)));
        assert!("c0".parse::<Letter>().is_err());
        assert!("x".parse::<Letter>().is_err());
    }

    #[test]
    fn sl2_family() {
        let fam = classify_family(2).unwrap();
        assert_eq!(fam.solved_value(A), Some(&(&Poly::var(M) - &Poly::int(3))));
        let three = fam.at_dim(3);
        assert_eq!(three.solved_value(A), Some(&Poly::int(0)));
        assert_eq!(three.solved_value(c(2)), Some(&Poly::int(4)));
        assert!(three.exclusions.is_empty());
    }

    #[test]
    fn sl2_verma_module() {
        let r = verma_action(2, 3, Rational::zero(), vec![Rational::from_int(4)], &[Letter::D; 3]).unwrap();
        assert!(r.irreducible());
        assert!(r.matrix.iter().flatten().all(Rational::is_zero));
        assert!(r.dd_scalars.iter().all(|s| !s.is_zero()));
        let bad = verma_action(2, 3, Rational::one(), vec![Rational::from_int(4)], &[]).unwrap();
        assert!(!bad.irreducible());
    }
}
