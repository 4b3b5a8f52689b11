//! Free-field systems on `n x n` matrices and their named composite fields.
//!
//! The `beta gamma` system has generators `beta^{ab}`, `gamma^{ab}` and the
//! `bc` system `b^{ab}`, `c^{ab}`, for `1 <= a, b <= n`. Every other field
//! here (currents, the `pgl(n|n)` realization, `D`, `D'`, `C_i`, conformal
//! vectors) is built from these by Wick products.

mod lie;
mod sugawara;

use std::collections::BTreeMap;
use std::sync::RwLock;

pub use lie::{pgl_bracket, pgl_center, LieElement, PglBasis, Side};
pub use sugawara::{sugawara, toy_sl2, LieAlgebraData};

use crate::fixtures;
use crate::kernel::{Family, FieldExpr, Rational, Symbol};
use crate::ope::{self, normal_order, wick};
use crate::syntax::{self, AtomResolver, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("rank must be at least 2, got {0}")]
    RankTooSmall(u8),
    #[error("operation needs a {needed} model, this one is {found}")]
    WrongKind { needed: &'static str, found: ModelKind },
    #[error("element belongs to the wrong algebra: {0}")]
    WrongAlgebra(&'static str),
    #[error("no {name} is available for n = {n}")]
    Unsupported { name: String, n: u8 },
    #[error("operand uses a generator outside this model")]
    MixedModel,
    #[error("Sugawara vector undefined at critical level (k + h^vee = 0)")]
    CriticalLevel,
    #[error("invariant form is degenerate on the supplied basis")]
    DegenerateForm,
    #[error("fixture {name} failed to parse: {source}")]
    Fixture { name: String, source: Box<SyntaxError> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Bg,
    Bc,
    BcBg,
}

impl ModelKind {
    fn has_bosons(self) -> bool {
        matches!(self, ModelKind::Bg | ModelKind::BcBg)
    }

    fn has_fermions(self) -> bool {
        matches!(self, ModelKind::Bc | ModelKind::BcBg)
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Bg => "bg",
            ModelKind::Bc => "bc",
            ModelKind::BcBg => "bcbg",
        })
    }
}

/// A pairwise contraction `x(z) y(w) ~ value (z-w)^{-pole}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionRule {
    pub left: Symbol,
    pub right: Symbol,
    pub pole: u32,
    pub value: Rational,
}

/// A free-field system of rank `n` with a write-once cache of named fields.
#[derive(Debug)]
pub struct ModelContext {
    n: u8,
    kind: ModelKind,
    roster: Vec<Symbol>,
    named: RwLock<BTreeMap<String, FieldExpr>>,
}

/// Builds the `bg`, `bc` or `bcbg` system of rank `n` and registers its
/// conformal vectors.
pub fn build_model(n: u8, kind: ModelKind) -> Result<ModelContext, ModelError> {
    if n < 2 {
        return Err(ModelError::RankTooSmall(n));
    }
    let mut families = Vec::new();
    if kind.has_bosons() {
        families.extend([Family::Beta, Family::Gamma]);
    }
    if kind.has_fermions() {
        families.extend([Family::B, Family::C]);
    }
    let mut roster = Vec::new();
    for fam in families {
        for a in 1..=n {
            for b in 1..=n {
                roster.push(Symbol::new(fam, a, b));
            }
        }
    }
    let m = ModelContext { n, kind, roster, named: RwLock::new(BTreeMap::new()) };
    if kind.has_bosons() {
        let ls = m.conformal_bg();
        m.register("L_S", ls);
    }
    if kind.has_fermions() {
        let le = m.conformal_bc();
        m.register("L_E", le);
    }
    Ok(m)
}

impl ModelContext {
    pub fn rank(&self) -> u8 {
        self.n
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn roster(&self) -> &[Symbol] {
        &self.roster
    }

    pub fn contraction_rules(&self) -> Vec<ContractionRule> {
        let mut out = Vec::new();
        for x in &self.roster {
            for y in &self.roster {
                let v = x.contraction(y);
                if v != 0 {
                    out.push(ContractionRule { left: *x, right: *y, pole: 1, value: Rational::from_int(v) });
                }
            }
        }
        out
    }

    /// `true` iff every generator occurring in `e` belongs to this model.
    pub fn contains(&self, e: &FieldExpr) -> bool {
        e.terms().all(|(m, _)| {
            m.factors().iter().all(|f| {
                let s = f.symbol;
                s.row >= 1
                    && s.col >= 1
                    && s.row <= self.n
                    && s.col <= self.n
                    && match s.family {
                        Family::Beta | Family::Gamma => self.kind.has_bosons(),
                        Family::B | Family::C => self.kind.has_fermions(),
                    }
            })
        })
    }

    /// `a o_n b`, rejecting operands from another model.
    pub fn circle(&self, a: &FieldExpr, b: &FieldExpr, n: i64) -> Result<FieldExpr, ModelError> {
        if !self.contains(a) || !self.contains(b) {
            return Err(ModelError::MixedModel);
        }
        Ok(ope::circle(a, b, n))
    }

    fn register(&self, name: &str, e: FieldExpr) {
        self.named.write().expect("registry lock").entry(name.to_string()).or_insert(e);
    }

    /// Cached lookup; `build` runs at most once per name.
    fn cached(
        &self,
        name: &str,
        build: impl FnOnce() -> Result<FieldExpr, ModelError>,
    ) -> Result<FieldExpr, ModelError> {
        if let Some(e) = self.named.read().expect("registry lock").get(name) {
            return Ok(e.clone());
        }
        let e = build()?;
        self.register(name, e.clone());
        Ok(self.named.read().expect("registry lock")[name].clone())
    }

    /// A registered field by name, if already built.
    pub fn named(&self, name: &str) -> Option<FieldExpr> {
        self.named.read().expect("registry lock").get(name).cloned()
    }

    fn gen(&self, fam: Family, a: u8, b: u8) -> FieldExpr {
        FieldExpr::generator(Symbol::new(fam, a, b))
    }

    fn require_bosons(&self) -> Result<(), ModelError> {
        if self.kind.has_bosons() {
            Ok(())
        } else {
            Err(ModelError::WrongKind { needed: "bg or bcbg", found: self.kind })
        }
    }

    fn indices(&self) -> impl Iterator<Item = (u8, u8)> {
        let n = self.n;
        (1..=n).flat_map(move |a| (1..=n).map(move |b| (a, b)))
    }

    /// `L_S = 1/2 sum :beta d(gamma): - 1/2 sum :d(beta) gamma:`.
    fn conformal_bg(&self) -> FieldExpr {
        let half = Rational::new(1, 2);
        let mut out = FieldExpr::zero();
        for (a, b) in self.indices() {
            let be = self.gen(Family::Beta, a, b);
            let ga = self.gen(Family::Gamma, a, b);
            out.add_scaled(&wick(&be, &ga.derivative()), &half);
            out.add_scaled(&wick(&be.derivative(), &ga), &-&half);
        }
        out
    }

    /// `L_E = 1/2 sum :d(b) c: - 1/2 sum :b d(c):`.
    fn conformal_bc(&self) -> FieldExpr {
        let half = Rational::new(1, 2);
        let mut out = FieldExpr::zero();
        for (a, b) in self.indices() {
            let bb = self.gen(Family::B, a, b);
            let cc = self.gen(Family::C, a, b);
            out.add_scaled(&wick(&bb.derivative(), &cc), &half);
            out.add_scaled(&wick(&bb, &cc.derivative()), &-&half);
        }
        out
    }

    /// `theta^xi = - sum_i :gamma^{x'_i} beta^{rho(xi) x_i}:` for `xi` in
    /// either `gl_n` copy acting on the matrix space.
    pub fn current(&self, xi: &LieElement) -> Result<FieldExpr, ModelError> {
        self.require_bosons()?;
        let LieElement::Gl { side, matrix } = xi else {
            return Err(ModelError::WrongAlgebra("currents take a gl_n element"));
        };
        let n = self.n as usize;
        let mut out = FieldExpr::zero();
        for p in 0..n {
            for q in 0..n {
                let c = &matrix[p][q];
                if c.is_zero() {
                    continue;
                }
                let (p1, q1) = (p as u8 + 1, q as u8 + 1);
                for k in 1..=self.n {
                    // left:  rho(E_pq) x_{qk} = x_{pk}, so -:gamma^{qk} beta^{pk}:
                    // right: rho(E_pq) x_{kp} = -x_{kq}, so +:gamma^{kp} beta^{kq}:
                    let (term, sign) = match side {
                        Side::Left => (wick(&self.gen(Family::Gamma, q1, k), &self.gen(Family::Beta, p1, k)), -1),
                        Side::Right => (wick(&self.gen(Family::Gamma, k, p1), &self.gen(Family::Beta, k, q1)), 1),
                    };
                    out.add_scaled(&term, &(c * &Rational::from_int(sign)));
                }
            }
        }
        Ok(out)
    }

    /// `theta` of the elementary matrix `E_ij`.
    pub fn theta(&self, side: Side, i: u8, j: u8) -> FieldExpr {
        self.current(&LieElement::elementary(self.n, side, i, j)).expect("bosonic model")
    }

    /// `theta` of `E_11 - E_{i+1,i+1}`.
    pub fn theta_cartan(&self, side: Side, i: u8) -> FieldExpr {
        self.current(&LieElement::cartan(self.n, side, i)).expect("bosonic model")
    }

    /// A basis of both `sl_n` copies: off-diagonal `E_ij` and `E_11 - E_kk`.
    pub fn sl_currents(&self, side: Side) -> Vec<(String, FieldExpr)> {
        let tag = match side {
            Side::Left => "L",
            Side::Right => "R",
        };
        let mut out = Vec::new();
        for (i, j) in self.indices() {
            if i != j {
                out.push((format!("{tag}[{i},{j}]"), self.theta(side, i, j)));
            }
        }
        for i in 1..self.n {
            out.push((format!("{tag}H[{i}]"), self.theta_cartan(side, i)));
        }
        out
    }

    /// Both `sl_n` copies together.
    pub fn all_sl_currents(&self) -> Vec<(String, FieldExpr)> {
        let mut v = self.sl_currents(Side::Left);
        v.extend(self.sl_currents(Side::Right));
        v
    }

    /// `B+^{ab} = -:beta^{ac} gamma^{bc}:`.
    pub fn b_plus(&self, a: u8, b: u8) -> FieldExpr {
        self.theta(Side::Left, a, b)
    }

    /// `B-^{ab} = :gamma^{ca} beta^{cb}:`.
    pub fn b_minus(&self, a: u8, b: u8) -> FieldExpr {
        self.theta(Side::Right, a, b)
    }

    fn require_bcbg(&self) -> Result<(), ModelError> {
        if self.kind == ModelKind::BcBg {
            Ok(())
        } else {
            Err(ModelError::WrongKind { needed: "bcbg", found: self.kind })
        }
    }

    /// The realized `gl(n|n)` current of one basis element.
    pub fn pgl_field(&self, x: PglBasis) -> Result<FieldExpr, ModelError> {
        self.require_bcbg()?;
        self.cached(&x.name(), || Ok(self.build_pgl_field(x)))
    }

    fn build_pgl_field(&self, x: PglBasis) -> FieldExpr {
        let b = |i, j| self.gen(Family::B, i, j);
        let c = |i, j| self.gen(Family::C, i, j);
        let one = Rational::one();
        let mut out = FieldExpr::zero();
        match x {
            PglBasis::FMinus(a, bb) => {
                out.add_scaled(&b(bb, a), &-&one);
            }
            PglBasis::EPlus(a, bb) => {
                out += &self.b_plus(a, bb);
                for k in 1..=self.n {
                    out -= &wick(&b(bb, k), &c(a, k));
                }
            }
            PglBasis::EMinus(a, bb) => {
                out += &self.b_minus(a, bb);
                for k in 1..=self.n {
                    out += &wick(&b(k, a), &c(k, bb));
                }
            }
            PglBasis::FPlus(a, bb) => {
                for k in 1..=self.n {
                    out -= &wick(&c(k, bb), &self.b_plus(a, k));
                    out -= &wick(&c(a, k), &self.b_minus(k, bb));
                    for d in 1..=self.n {
                        out -= &normal_order(&[b(k, d), c(k, bb), c(a, d)]);
                    }
                }
            }
        }
        out
    }

    /// Every realized `gl(n|n)` current, registered by name.
    pub fn build_pgl_realization(&self) -> Result<Vec<(PglBasis, FieldExpr)>, ModelError> {
        self.require_bcbg()?;
        PglBasis::all(self.n).into_iter().map(|x| Ok((x, self.pgl_field(x)?))).collect()
    }

    /// The realized current of a `gl(n|n)` combination.
    pub fn pgl_current(&self, xi: &LieElement) -> Result<FieldExpr, ModelError> {
        let LieElement::Pgl(coeffs) = xi else {
            return Err(ModelError::WrongAlgebra("pgl_current takes a pgl(n|n) element"));
        };
        let mut out = FieldExpr::zero();
        for (x, c) in coeffs {
            out.add_scaled(&self.pgl_field(*x)?, c);
        }
        Ok(out)
    }

    /// `sum_sigma sgn(sigma) prod_i x^{i sigma(i)}` in the `beta` or `gamma`
    /// family. The factors never contract with each other.
    pub fn determinant_field(&self, family: Family) -> Result<FieldExpr, ModelError> {
        self.require_bosons()?;
        if !matches!(family, Family::Beta | Family::Gamma) {
            return Err(ModelError::WrongAlgebra("determinant fields use beta or gamma"));
        }
        let name = if family == Family::Beta { "D" } else { "D'" };
        self.cached(name, || {
            let n = self.n as usize;
            let mut out = FieldExpr::zero();
            let mut perm: Vec<usize> = (0..n).collect();
            permutations(&mut perm, 0, &mut |p| {
                let sign = permutation_sign(p);
                let mut term = FieldExpr::one();
                for (i, &j) in p.iter().enumerate() {
                    term = term.juxtapose(&self.gen(family, i as u8 + 1, j as u8 + 1));
                }
                out.add_scaled(&term, &Rational::from_int(sign));
            });
            Ok(out)
        })
    }

    pub fn d(&self) -> FieldExpr {
        self.determinant_field(Family::Beta).expect("bosonic model")
    }

    pub fn d_prime(&self) -> FieldExpr {
        self.determinant_field(Family::Gamma).expect("bosonic model")
    }

    /// `C_1 = sum :beta^{ij} gamma^{ij}:`; for `i >= 2`, the fixture
    /// expression in the `sl_n` current basis, expanded into free fields.
    pub fn casimir_field(&self, i: u8) -> Result<FieldExpr, ModelError> {
        self.require_bosons()?;
        let name = format!("C[{i}]");
        if i == 1 {
            return self.cached(&name, || {
                let mut out = FieldExpr::zero();
                for (a, b) in self.indices() {
                    out += &wick(&self.gen(Family::Beta, a, b), &self.gen(Family::Gamma, a, b));
                }
                Ok(out)
            });
        }
        let Some(text) = fixtures::casimir(self.n, i) else {
            return Err(ModelError::Unsupported { name, n: self.n });
        };
        self.cached(&name, || {
            syntax::parse(text, self).map_err(|e| ModelError::Fixture { name: name.clone(), source: Box::new(e) })
        })
    }

    /// Names of the strong generators, ordered `C_1 .. C_{n-1}, D, D'`.
    pub fn generator_names(&self) -> Vec<String> {
        let mut v: Vec<String> = (1..self.n).map(|i| format!("C[{i}]")).collect();
        v.extend(["D".to_string(), "D'".to_string()]);
        v
    }

    /// Looks up a strong generator or central field by name.
    pub fn generator(&self, name: &str) -> Result<FieldExpr, ModelError> {
        syntax::parse(name, self).map_err(|e| ModelError::Fixture { name: name.to_string(), source: Box::new(e) })
    }

    pub fn conformal_vector(&self, name: &str) -> Option<FieldExpr> {
        self.named(name)
    }
}

impl AtomResolver for ModelContext {
    fn rank(&self) -> u8 {
        self.n
    }

    fn resolve(&self, name: &str, idx: &[u8]) -> Result<FieldExpr, SyntaxError> {
        let n = self.n;
        let bad = || SyntaxError::UnknownAtom(format_atom(name, idx));
        let in_rank = |v: &[u8]| v.iter().all(|&x| x >= 1 && x <= n);
        let check = |want: usize| -> Result<(), SyntaxError> {
            if idx.len() != want {
                return Err(bad());
            }
            if !in_rank(idx) {
                return Err(SyntaxError::IndexOutOfRank { atom: format_atom(name, idx), rank: n });
            }
            Ok(())
        };
        match name {
            "beta" | "gamma" | "b" | "c" => {
                check(2)?;
                let fam = Family::from_name(name).expect("family name");
                let e = self.gen(fam, idx[0], idx[1]);
                if !self.contains(&e) {
                    return Err(bad());
                }
                Ok(e)
            }
            "D" => {
                check(0)?;
                self.determinant_field(Family::Beta).map_err(model_err)
            }
            "D'" => {
                check(0)?;
                self.determinant_field(Family::Gamma).map_err(model_err)
            }
            "C" => {
                if idx.len() != 1 || idx[0] < 1 {
                    return Err(bad());
                }
                self.casimir_field(idx[0]).map_err(model_err)
            }
            "E+" | "E-" | "F+" | "F-" => {
                check(2)?;
                let x = match name {
                    "E+" => PglBasis::EPlus(idx[0], idx[1]),
                    "E-" => PglBasis::EMinus(idx[0], idx[1]),
                    "F+" => PglBasis::FPlus(idx[0], idx[1]),
                    _ => PglBasis::FMinus(idx[0], idx[1]),
                };
                self.pgl_field(x).map_err(model_err)
            }
            "B+" | "B-" => {
                check(2)?;
                self.require_bosons().map_err(model_err)?;
                Ok(if name == "B+" { self.b_plus(idx[0], idx[1]) } else { self.b_minus(idx[0], idx[1]) })
            }
            "L" | "R" => {
                check(2)?;
                self.require_bosons().map_err(model_err)?;
                let side = if name == "L" { Side::Left } else { Side::Right };
                Ok(self.theta(side, idx[0], idx[1]))
            }
            "LH" | "RH" => {
                if idx.len() != 1 || idx[0] < 1 || idx[0] >= n {
                    return Err(bad());
                }
                self.require_bosons().map_err(model_err)?;
                let side = if name == "LH" { Side::Left } else { Side::Right };
                Ok(self.theta_cartan(side, idx[0]))
            }
            "L_S" | "L_E" => {
                check(0)?;
                self.named(name).ok_or_else(bad)
            }
            _ => Err(bad()),
        }
    }
}

fn model_err(e: ModelError) -> SyntaxError {
    SyntaxError::Model(e.to_string())
}

fn format_atom(name: &str, idx: &[u8]) -> String {
    if idx.is_empty() {
        name.to_string()
    } else {
        let parts: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
        format!("{name}[{}]", parts.join(","))
    }
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

fn permutation_sign(p: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ope::ope_singular;

    #[test]
    fn rosters() {
        assert_eq!(build_model(2, ModelKind::Bg).unwrap().roster().len(), 8);
        assert_eq!(build_model(2, ModelKind::BcBg).unwrap().roster().len(), 16);
        assert!(matches!(build_model(1, ModelKind::Bg), Err(ModelError::RankTooSmall(1))));
    }

    #[test]
    fn conformal_weights() {
        let m = build_model(2, ModelKind::BcBg).unwrap();
        let ls = m.conformal_vector("L_S").unwrap();
        let b = FieldExpr::generator(Symbol::beta(1, 1));
        let t = ope_singular(&ls, &b);
        assert_eq!(t.len(), 2);
        assert_eq!(t.get(2), b.scale(&Rational::new(1, 2)));
        assert_eq!(t.get(1), b.derivative());
        let le = m.conformal_vector("L_E").unwrap();
        let c = FieldExpr::generator(Symbol::c(2, 1));
        let t = ope_singular(&le, &c);
        assert_eq!(t.get(2), c.scale(&Rational::new(1, 2)));
        assert_eq!(t.get(1), c.derivative());
    }

    #[test]
    fn determinant_n2() {
        let m = build_model(2, ModelKind::Bg).unwrap();
        let g = |a, b| FieldExpr::generator(Symbol::gamma(a, b));
        let expected = &wick(&g(1, 1), &g(2, 2)) - &wick(&g(1, 2), &g(2, 1));
        assert_eq!(m.d_prime(), expected);
        let m4 = build_model(4, ModelKind::Bg).unwrap();
        assert_eq!(m4.d().weight().unwrap(), Rational::from_int(2));
        assert_eq!(m4.d().len(), 24);
    }

    #[test]
    fn affine_level_is_minus_n() {
        for n in 2..=3u8 {
            let m = build_model(n, ModelKind::Bg).unwrap();
            for side in [Side::Left, Side::Right] {
                let t = ope_singular(&m.theta(side, 1, 2), &m.theta(side, 2, 1));
                // k B(E12, E21) with B = -tr(rho rho) = -n tr.
                assert_eq!(t.get(2), FieldExpr::scalar(Rational::from_int(-(n as i64))));
                // pole 1 is theta of [E12, E21] = E11 - E22.
                assert_eq!(t.get(1), m.theta_cartan(side, 1));
            }
            for (_, x) in m.sl_currents(Side::Left) {
                for (_, y) in m.sl_currents(Side::Right) {
                    assert!(ope::commutes(&x, &y));
                }
            }
        }
    }

    #[test]
    fn c1_is_minus_identity_current() {
        let m = build_model(3, ModelKind::Bg).unwrap();
        let id = LieElement::Gl {
            side: Side::Left,
            matrix: (0..3).map(|i| (0..3).map(|j| Rational::from_int((i == j) as i64)).collect()).collect(),
        };
        assert_eq!(m.casimir_field(1).unwrap(), -m.current(&id).unwrap());
    }

    #[test]
    fn pgl_center_vanishes() {
        let m = build_model(2, ModelKind::BcBg).unwrap();
        let total = m.pgl_current(&LieElement::Pgl(pgl_center(2))).unwrap();
        assert!(total.is_zero());
        assert_eq!(m.pgl_field(PglBasis::FMinus(1, 2)).unwrap(), -FieldExpr::generator(Symbol::b(2, 1)));
    }

    #[test]
    fn wrong_kind_and_algebra() {
        let m = build_model(2, ModelKind::Bg).unwrap();
        assert!(matches!(m.pgl_field(PglBasis::EPlus(1, 1)), Err(ModelError::WrongKind { .. })));
        assert!(matches!(
            m.current(&LieElement::pgl(PglBasis::EPlus(1, 1))),
            Err(ModelError::WrongAlgebra(_))
        ));
        let other = FieldExpr::generator(Symbol::b(1, 1));
        assert!(matches!(m.circle(&other, &m.d(), 0), Err(ModelError::MixedModel)));
    }
}
