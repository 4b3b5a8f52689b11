//! Commutant membership, generator OPE tables, relations among generators
//! and the low-weight shadow of free generation.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::fixtures;
use crate::kernel::linalg::{Echelon, SparseVec};
use crate::kernel::{FieldExpr, Monomial, Rational};
use crate::models::{ModelContext, ModelError, PglBasis, Side};
use crate::ope::{self, OpeTable};
use crate::syntax::{self, render, Ast, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CommutantError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("golden file line {line}: {message}")]
    Golden { line: usize, message: String },
    #[error("no reference data for n = {0}")]
    MissingFixture(u8),
}

/// Which currents a membership check runs against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurrentSet {
    SlLeft,
    SlRight,
    SlBoth,
    /// Every realized `gl(n|n)` basis current, odd ones included.
    Pgl,
    /// A basis of `psl(n|n)`: off-diagonal `E+`, `E-`, the differences
    /// `E+-[1,1] - E+-[k,k]`, and every odd `F+`, `F-`.
    Psl,
}

pub fn currents(m: &ModelContext, set: CurrentSet) -> Result<Vec<(String, FieldExpr)>, ModelError> {
    Ok(match set {
        CurrentSet::SlLeft => m.sl_currents(Side::Left),
        CurrentSet::SlRight => m.sl_currents(Side::Right),
        CurrentSet::SlBoth => m.all_sl_currents(),
        CurrentSet::Pgl => m.build_pgl_realization()?.into_iter().map(|(x, e)| (x.name(), e)).collect(),
        CurrentSet::Psl => psl_currents(m)?,
    })
}

fn psl_currents(m: &ModelContext) -> Result<Vec<(String, FieldExpr)>, ModelError> {
    let n = m.rank();
    let mut out = Vec::new();
    for x in PglBasis::all(n) {
        let diagonal = match x {
            PglBasis::EPlus(a, b) | PglBasis::EMinus(a, b) => a == b,
            _ => false,
        };
        if !diagonal {
            out.push((x.name(), m.pgl_field(x)?));
        }
    }
    for k in 2..=n {
        for (tag, make) in [("E+", PglBasis::EPlus as fn(u8, u8) -> PglBasis), ("E-", PglBasis::EMinus)] {
            let mut e = m.pgl_field(make(1, 1))?;
            e -= &m.pgl_field(make(k, k))?;
            out.push((format!("{tag}[1,1]-{tag}[{k},{k}]"), e));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub current: String,
    pub pole: u32,
    pub value: FieldExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutantReport {
    pub field: String,
    /// One entry per current and pole `1 ..= wt(current) + wt(field)`.
    pub residuals: Vec<Residual>,
    pub pass: bool,
}

impl CommutantReport {
    pub fn failures(&self) -> impl Iterator<Item = &Residual> {
        self.residuals.iter().filter(|r| !r.value.is_zero())
    }
}

/// Largest conformal weight among the terms; zero for the zero field.
pub fn max_weight(e: &FieldExpr) -> Rational {
    e.terms().map(|(m, _)| m.weight()).max().unwrap_or_else(Rational::zero)
}

fn floor_to_u32(q: &Rational) -> u32 {
    if q.is_negative() {
        return 0;
    }
    let b = q.to_big();
    let f = b.numer() / b.denom();
    u32::try_from(f).unwrap_or(u32::MAX)
}

/// `circle(theta, v, j)` for every current and `0 <= j <= wt(theta) + wt(v) - 1`.
pub fn verify_membership(field: &str, v: &FieldExpr, currents: &[(String, FieldExpr)]) -> CommutantReport {
    let wv = max_weight(v);
    let per_current: Vec<Vec<Residual>> = currents
        .par_iter()
        .map(|(name, theta)| {
            let table = ope::ope_singular(theta, v);
            let depth = floor_to_u32(&(&max_weight(theta) + &wv));
            let top = depth.max(table.max_pole().unwrap_or(0));
            (1..=top)
                .map(|pole| Residual { current: name.clone(), pole, value: table.get(pole) })
                .collect()
        })
        .collect();
    let residuals: Vec<Residual> = per_current.into_iter().flatten().collect();
    let pass = residuals.iter().all(|r| r.value.is_zero());
    CommutantReport { field: field.to_string(), residuals, pass }
}

/// An ordered generator pair and its singular OPE.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTable {
    pub left: String,
    pub right: String,
    pub table: OpeTable,
}

/// Singular OPEs of every pair `(g_i, g_j)`, `i <= j`, in the order of
/// [`ModelContext::generator_names`].
pub fn generator_ope_tables(m: &ModelContext) -> Result<Vec<PairTable>, ModelError> {
    let names = m.generator_names();
    let fields = names.iter().map(|g| m.generator(g)).collect::<Result<Vec<_>, _>>()?;
    let pairs: Vec<(usize, usize)> =
        (0..names.len()).flat_map(|i| (i..names.len()).map(move |j| (i, j))).collect();
    Ok(pairs
        .par_iter()
        .map(|&(i, j)| PairTable {
            left: names[i].clone(),
            right: names[j].clone(),
            table: ope::ope_singular(&fields[i], &fields[j]),
        })
        .collect())
}

/// The table of `b(z) a(w)` from that of `a(z) b(w)`:
/// `b o_n a = s sum_{j>=0} (-1)^{n+j+1} d^j/j! (a o_{n+j} b)`, with `s = -1`
/// iff both fields are odd.
pub fn skew_table(ab: &OpeTable, both_odd: bool) -> OpeTable {
    let mut out = OpeTable::new();
    let Some(top) = ab.max_pole() else {
        return out;
    };
    for pole in 1..=top {
        let n = pole as i64 - 1;
        let mut acc = FieldExpr::zero();
        for (p, e) in ab.iter() {
            if p < pole {
                continue;
            }
            let j = (p - pole) as i64;
            let mut c = Rational::factorial(j as u32).recip();
            if (n + j + 1) % 2 != 0 {
                c = -c;
            }
            if both_odd {
                c = -c;
            }
            acc.add_scaled(&e.nth_derivative(j as u32), &c);
        }
        out.insert(pole, acc);
    }
    out
}

/// `(circle(D, D', n-1), circle(D, D', n-2))`.
pub fn leading_ope(m: &ModelContext) -> Result<(FieldExpr, FieldExpr), ModelError> {
    let n = m.rank() as i64;
    let d = m.generator("D")?;
    let dp = m.generator("D'")?;
    Ok((m.circle(&d, &dp, n - 1)?, m.circle(&d, &dp, n - 2)?))
}

/// One `left | right | pole | value` line of a golden table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenEntry {
    pub left: String,
    pub right: String,
    pub pole: u32,
    pub value: Ast,
}

pub fn parse_golden_table(text: &str) -> Result<Vec<GoldenEntry>, CommutantError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let golden = |message: String| CommutantError::Golden { line: i + 1, message };
        let parts: Vec<&str> = line.split('|').map(str::trim).collect();
        let [left, right, pole, value] = parts[..] else {
            return Err(golden(format!("expected four '|'-separated fields, found {}", parts.len())));
        };
        let pole = pole.parse::<u32>().map_err(|e| golden(format!("pole {pole}: {e}")))?;
        let value = syntax::parse_ast(value).map_err(|e| golden(e.to_string()))?;
        out.push(GoldenEntry { left: left.into(), right: right.into(), pole, value });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMismatch {
    pub left: String,
    pub right: String,
    pub pole: u32,
    pub expected: FieldExpr,
    pub computed: FieldExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenReport {
    pub n: u8,
    pub entries_checked: usize,
    pub mismatches: Vec<TableMismatch>,
    /// Highest pole of `C_1(z) C_1(w)` as computed.
    pub c1c1_pole: Option<u32>,
    /// Set when the reference listing prints a different `C_1 C_1` exponent.
    pub annotation: Option<String>,
}

impl GoldenReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Exponent of `(z-w)` printed for `C_1(z) C_1(w)` in the reference listing.
pub fn printed_c1c1_exponent(n: u8) -> i32 {
    match n {
        2 => -2,
        3 => 2,
        _ => -1,
    }
}

/// Compares computed tables against the golden table of rank `n`, pole by
/// pole, after expanding both sides into free fields. Pairs and poles absent
/// from the golden file must vanish.
pub fn compare_with_golden(m: &ModelContext, tables: &[PairTable]) -> Result<GoldenReport, CommutantError> {
    let n = m.rank();
    let text = fixtures::golden_ope(n).ok_or(CommutantError::MissingFixture(n))?;
    let entries = parse_golden_table(text)?;
    let mut expected: BTreeMap<(String, String, u32), FieldExpr> = BTreeMap::new();
    for e in &entries {
        let v = e.value.eval(m)?;
        *expected.entry((e.left.clone(), e.right.clone(), e.pole)).or_default() += &v;
    }
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for pt in tables {
        let top = pt.table.max_pole().unwrap_or(0);
        let golden_top = expected
            .keys()
            .filter(|(l, r, _)| *l == pt.left && *r == pt.right)
            .map(|k| k.2)
            .max()
            .unwrap_or(0);
        for pole in 1..=top.max(golden_top) {
            let want = expected.get(&(pt.left.clone(), pt.right.clone(), pole)).cloned().unwrap_or_default();
            let got = pt.table.get(pole);
            checked += 1;
            if want != got {
                mismatches.push(TableMismatch {
                    left: pt.left.clone(),
                    right: pt.right.clone(),
                    pole,
                    expected: want,
                    computed: got,
                });
            }
        }
    }
    for (l, r, pole) in expected.keys() {
        if !tables.iter().any(|t| t.left == *l && t.right == *r) {
            return Err(CommutantError::Golden { line: 0, message: format!("no computed table for {l} x {r} (pole {pole})") });
        }
    }
    let c1c1_pole = tables.iter().find(|t| t.left == "C[1]" && t.right == "C[1]").and_then(|t| t.table.max_pole());
    let printed = printed_c1c1_exponent(n);
    let annotation = match c1c1_pole {
        Some(p) if printed != -(p as i32) => Some(format!(
            "C[1] x C[1]: computed pole order {p}, reference listing prints (z-w)^{printed}"
        )),
        _ => None,
    };
    Ok(GoldenReport { n, entries_checked: checked, mismatches, c1c1_pole, annotation })
}

/// A named identity among generators, kept as a syntax tree so single
/// coefficients can be perturbed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub ast: Ast,
}

/// Parses `[name]` blocks, each followed by one expression.
pub fn parse_relations(text: &str) -> Result<Vec<Relation>, CommutantError> {
    let mut blocks: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            blocks.push((i + 1, name.to_string(), String::new()));
        } else if let Some(last) = blocks.last_mut() {
            last.2.push(' ');
            last.2.push_str(line);
        } else {
            return Err(CommutantError::Golden { line: i + 1, message: "expression before the first [name]".into() });
        }
    }
    blocks
        .into_iter()
        .map(|(line, name, body)| {
            let ast = syntax::parse_ast(&body).map_err(|e| CommutantError::Golden { line, message: e.to_string() })?;
            Ok(Relation { name, ast })
        })
        .collect()
}

/// `true` iff `expr` is identically zero in the free-field algebra.
pub fn relation_check(expr: &FieldExpr) -> bool {
    expr.is_zero()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    pub name: String,
    pub holds: bool,
    pub residual: FieldExpr,
    /// For each top-level term, whether scaling its coefficient by 2/3 breaks
    /// the identity.
    pub controls_rejected: Vec<bool>,
}

/// Evaluates a relation term by term, then every single-coefficient
/// perturbation `c_i -> (2/3) c_i` of it.
pub fn check_relation(m: &ModelContext, rel: &Relation) -> Result<RelationReport, CommutantError> {
    let terms = syntax::top_level_terms(&rel.ast);
    let values = terms
        .par_iter()
        .map(|(c, t)| t.eval(m).map(|v| v.scale(c)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut total = FieldExpr::zero();
    for v in &values {
        total += v;
    }
    let shift = Rational::new(-1, 3);
    let controls_rejected = values
        .iter()
        .map(|v| {
            let mut p = total.clone();
            p.add_scaled(v, &shift);
            !relation_check(&p)
        })
        .collect();
    Ok(RelationReport { name: rel.name.clone(), holds: relation_check(&total), residual: total, controls_rejected })
}

/// Every golden relation of the model's rank.
pub fn check_golden_relations(m: &ModelContext) -> Result<Vec<RelationReport>, CommutantError> {
    let n = m.rank();
    let text = fixtures::golden_relations(n).ok_or(CommutantError::MissingFixture(n))?;
    parse_relations(text)?.iter().map(|r| check_relation(m, r)).collect()
}

/// `d^order` of the generator at `index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenAtom {
    pub index: usize,
    pub order: u32,
}

/// Non-decreasing sequences of generator atoms whose weights sum to at most
/// `max` (exactly `max` when `exact`), excluding the empty sequence.
pub fn ordered_monomials(weights: &[Rational], max: &Rational, exact: bool) -> Vec<Vec<GenAtom>> {
    fn go(
        weights: &[Rational],
        left: &Rational,
        from: GenAtom,
        cur: &mut Vec<GenAtom>,
        exact: bool,
        out: &mut Vec<Vec<GenAtom>>,
    ) {
        if !cur.is_empty() && (!exact || left.is_zero()) {
            out.push(cur.clone());
        }
        for index in from.index..weights.len() {
            let start = if index == from.index { from.order } else { 0 };
            let mut order = start;
            loop {
                let w = &weights[index] + &Rational::from_int(order as i64);
                if w > *left || (w.is_zero() && order > 0) {
                    break;
                }
                if w.is_zero() {
                    // Weight-zero atoms would repeat forever.
                    break;
                }
                let atom = GenAtom { index, order };
                cur.push(atom);
                go(weights, &(left - &w), atom, cur, exact, out);
                cur.pop();
                order += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(weights, max, GenAtom { index: 0, order: 0 }, &mut Vec::new(), exact, &mut out);
    out
}

/// The right-nested normal ordering of the atoms.
pub fn expand_monomial(gens: &[FieldExpr], mono: &[GenAtom]) -> FieldExpr {
    let fields: Vec<FieldExpr> = mono.iter().map(|a| gens[a.index].nth_derivative(a.order)).collect();
    ope::normal_order(&fields)
}

pub fn render_gen_monomial(names: &[String], mono: &[GenAtom]) -> String {
    let atom = |a: &GenAtom| {
        if a.order == 0 {
            names[a.index].clone()
        } else {
            format!("d^{}({})", a.order, names[a.index])
        }
    };
    match mono {
        [a] => atom(a),
        _ => format!("NO({})", mono.iter().map(atom).collect::<Vec<_>>().join(", ")),
    }
}

fn to_sparse(e: &FieldExpr) -> SparseVec<Monomial> {
    e.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowReport {
    pub max_weight: Rational,
    pub monomials: usize,
    pub rank: usize,
    /// Labels of monomials found dependent on earlier ones.
    pub dependent: Vec<String>,
}

impl ShadowReport {
    pub fn independent(&self) -> bool {
        self.dependent.is_empty() && self.rank == self.monomials
    }
}

/// Linear independence of all ordered monomials in the strong generators
/// and their derivatives up to total weight `max_weight`.
pub fn free_generation_shadow(m: &ModelContext, limit: &Rational) -> Result<ShadowReport, ModelError> {
    let names = m.generator_names();
    let gens = names.iter().map(|g| m.generator(g)).collect::<Result<Vec<_>, _>>()?;
    let weights: Vec<Rational> = gens.iter().map(max_weight).collect();
    let monos = ordered_monomials(&weights, limit, false);
    let expanded: Vec<FieldExpr> = monos.par_iter().map(|mo| expand_monomial(&gens, mo)).collect();
    let mut ech: Echelon<Monomial> = Echelon::new();
    let mut dependent = Vec::new();
    for (i, e) in expanded.iter().enumerate() {
        if !ech.insert(to_sparse(e), i) {
            dependent.push(render_gen_monomial(&names, &monos[i]));
        }
    }
    Ok(ShadowReport { max_weight: limit.clone(), monomials: monos.len(), rank: ech.rank(), dependent })
}

/// Writes a homogeneous field as a combination of ordered generator
/// monomials of the same weight, rendered in the expression syntax.
pub fn express_in_generators(m: &ModelContext, value: &FieldExpr) -> Result<Option<String>, ModelError> {
    if value.is_zero() {
        return Ok(Some("0".into()));
    }
    if let Some(c) = value.as_scalar() {
        return Ok(Some(syntax::render(&FieldExpr::scalar(c))));
    }
    let Ok(w) = value.weight() else {
        return Ok(None);
    };
    let names = m.generator_names();
    let gens = names.iter().map(|g| m.generator(g)).collect::<Result<Vec<_>, _>>()?;
    let weights: Vec<Rational> = gens.iter().map(max_weight).collect();
    let monos = ordered_monomials(&weights, &w, true);
    let expanded: Vec<FieldExpr> = monos.par_iter().map(|mo| expand_monomial(&gens, mo)).collect();
    let mut ech: Echelon<Monomial> = Echelon::new();
    for (i, e) in expanded.iter().enumerate() {
        ech.insert(to_sparse(e), i);
    }
    let Some(combo) = ech.solve(to_sparse(value)) else {
        return Ok(None);
    };
    let text = syntax::join_terms(
        combo
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (c, Some(render_gen_monomial(&names, &monos[i])))),
    );
    Ok(Some(text))
}

/// Renders a table with entries in generator language where possible and
/// free fields otherwise.
pub fn render_table(m: &ModelContext, t: &OpeTable) -> Result<Vec<(u32, String)>, ModelError> {
    t.iter()
        .map(|(p, e)| Ok((p, express_in_generators(m, e)?.unwrap_or_else(|| render(e)))))
        .collect()
}

/// Names of all `gl(n|n)` basis currents.
pub fn pgl_names(n: u8) -> Vec<String> {
    PglBasis::all(n).into_iter().map(PglBasis::name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Symbol;
    use crate::models::{build_model, ModelKind};

    #[test]
    fn unit_passes_and_beta_fails() {
        let m = build_model(2, ModelKind::Bg).unwrap();
        let cur = currents(&m, CurrentSet::SlBoth).unwrap();
        assert!(verify_membership("1", &FieldExpr::one(), &cur).pass);
        let r = verify_membership("beta[1,1]", &FieldExpr::generator(Symbol::beta(1, 1)), &cur);
        assert!(!r.pass);
        assert!(r.failures().all(|x| x.pole == 1));
    }

    #[test]
    fn skew_of_heisenberg() {
        let m = build_model(2, ModelKind::Bg).unwrap();
        let c1 = m.generator("C[1]").unwrap();
        let d = m.generator("D").unwrap();
        let ab = ope::ope_singular(&c1, &d);
        assert_eq!(skew_table(&ab, false), ope::ope_singular(&d, &c1));
    }

    #[test]
    fn ordered_monomials_count() {
        let w = [Rational::one(), Rational::one()];
        // weight 1: a, b; weight 2: aa, ab, bb, da, db.
        assert_eq!(ordered_monomials(&w, &Rational::from_int(2), false).len(), 7);
        assert_eq!(ordered_monomials(&w, &Rational::from_int(2), true).len(), 5);
    }

    #[test]
    fn relation_blocks() {
        let r = parse_relations("# c\n[A]\n1 +\n 2\n[B]\nC[1]\n").unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].name, "A");
        assert!(parse_relations("1\n[A]\n2").is_err());
    }

    #[test]
    fn golden_lines() {
        let g = parse_golden_table("# x\nC[1] | D | 1 | -2*D\n").unwrap();
        assert_eq!(g[0].pole, 1);
        assert!(parse_golden_table("C[1] | D | 1").is_err());
        assert!(parse_golden_table("C[1] | D | x | 1").is_err());
    }
}
