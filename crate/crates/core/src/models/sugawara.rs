//! Sugawara conformal vectors for affine currents.

use crate::kernel::{FieldExpr, Rational, Symbol};
use crate::ope::wick;

use super::ModelError;

/// An even Lie algebra presented by the invariant form on a chosen basis and
/// the dual Coxeter number measured in that form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebraData {
    pub name: String,
    pub form: Vec<Vec<Rational>>,
    pub dual_coxeter: Rational,
}

impl LieAlgebraData {
    /// `sl_n` with the trace form, on the basis `E_ij (i != j)` in row-major
    /// order followed by `E_11 - E_kk`, `k = 2..n`.
    pub fn sl_trace(n: u8) -> Self {
        let off: Vec<(u8, u8)> =
            (1..=n).flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        let dim = off.len() + n as usize - 1;
        let mut form = vec![vec![Rational::zero(); dim]; dim];
        for (x, &(i, j)) in off.iter().enumerate() {
            for (y, &(k, l)) in off.iter().enumerate() {
                if j == k && i == l {
                    form[x][y] = Rational::one();
                }
            }
        }
        for a in 0..(n as usize - 1) {
            for b in 0..(n as usize - 1) {
                form[off.len() + a][off.len() + b] = Rational::from_int(1 + (a == b) as i64);
            }
        }
        LieAlgebraData { name: format!("sl_{n}"), form, dual_coxeter: Rational::from_int(n as i64) }
    }

    /// `pgl(n|n)`, whose dual Coxeter number is zero. Only the critical-level
    /// guard is meaningful for it, so the form is left zero.
    pub fn pgl(n: u8) -> Self {
        let dim = 4 * n as usize * n as usize;
        LieAlgebraData {
            name: format!("pgl({n}|{n})"),
            form: vec![vec![Rational::zero(); dim]; dim],
            dual_coxeter: Rational::zero(),
        }
    }
}

fn inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| Rational::from_int((i == j) as i64)));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(p, col);
        let piv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x = &*x * &piv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let t = &a[col][c] * &f;
                    a[r][c] -= &t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// `L = 1/(2(k + h^vee)) sum_{ij} (B^{-1})_{ij} :X^i X^j:`.
pub fn sugawara(currents: &[FieldExpr], algebra: &LieAlgebraData, k: &Rational) -> Result<FieldExpr, ModelError> {
    let shifted = k + &algebra.dual_coxeter;
    if shifted.is_zero() {
        return Err(ModelError::CriticalLevel);
    }
    if currents.len() != algebra.form.len() {
        return Err(ModelError::WrongAlgebra("current count differs from the algebra dimension"));
    }
    let inv = inverse(&algebra.form).ok_or(ModelError::DegenerateForm)?;
    let mut out = FieldExpr::zero();
    for (i, x) in currents.iter().enumerate() {
        for (j, y) in currents.iter().enumerate() {
            if !inv[i][j].is_zero() {
                out.add_scaled(&wick(x, y), &inv[i][j]);
            }
        }
    }
    Ok(out.scale(&(Rational::from_int(2) * shifted).recip()))
}

/// `sl_2` at level 1 from a single `beta gamma` pair: `e = 1/2 :beta beta:`,
/// `f = -1/2 :gamma gamma:`, `h = -:beta gamma:`, with form `B = -tr/2`.
pub fn toy_sl2() -> (Vec<FieldExpr>, LieAlgebraData, Rational) {
    let b = FieldExpr::generator(Symbol::beta(1, 1));
    let g = FieldExpr::generator(Symbol::gamma(1, 1));
    let half = Rational::new(1, 2);
    let e = wick(&b, &b).scale(&half);
    let f = wick(&g, &g).scale(&-&half);
    let h = -wick(&b, &g);
    let z = Rational::zero;
    let form = vec![
        vec![z(), -&half, z()],
        vec![-&half, z(), z()],
        vec![z(), z(), -Rational::one()],
    ];
    let data = LieAlgebraData { name: "sl_2 (toy)".into(), form, dual_coxeter: Rational::from_int(-4) };
    (vec![e, f, h], data, Rational::one())
}
