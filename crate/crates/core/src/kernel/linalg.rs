//! Sparse exact linear algebra over rationals.
//!
//! Vectors are sparse maps keyed by any ordered basis label. An [`Echelon`]
//! holds rows whose pivot is their smallest key, so a single ascending sweep
//! reduces any vector against it.

use std::collections::BTreeMap;
use std::ops::Bound;

use super::Rational;

pub type SparseVec<K> = BTreeMap<K, Rational>;

/// `v += c * w`, dropping zeros.
pub fn axpy<K: Ord + Clone>(v: &mut SparseVec<K>, c: &Rational, w: &SparseVec<K>) {
    if c.is_zero() {
        return;
    }
    for (k, x) in w {
        let entry = v.entry(k.clone()).or_insert_with(Rational::zero);
        *entry += x * c;
        if entry.is_zero() {
            v.remove(k);
        }
    }
}

#[derive(Debug, Clone)]
struct Row<K> {
    vec: SparseVec<K>,
    /// This row as a combination of the inserted vectors, by label.
    combo: BTreeMap<usize, Rational>,
}

/// Incremental row echelon form remembering how each row was built.
#[derive(Debug, Clone)]
pub struct Echelon<K> {
    rows: Vec<Row<K>>,
    pivots: BTreeMap<K, usize>,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Echelon { rows: Vec::new(), pivots: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` to its remainder modulo the row space. The returned map
    /// records `v - remainder` as a combination of inserted labels.
    pub fn reduce(&self, mut v: SparseVec<K>) -> (SparseVec<K>, BTreeMap<usize, Rational>) {
        let mut used: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut cursor: Option<K> = None;
        loop {
            let next = {
                let range = match &cursor {
                    None => v.range::<K, _>(..),
                    Some(k) => v.range::<K, _>((Bound::Excluded(k), Bound::Unbounded)),
                };
                let mut found = None;
                for (k, _) in range {
                    if self.pivots.contains_key(k) {
                        found = Some(k.clone());
                        break;
                    }
                }
                found
            };
            let Some(k) = next else { break };
            let r = &self.rows[self.pivots[&k]];
            let c = &v[&k] / &r.vec[&k];
            axpy(&mut v, &-&c, &r.vec);
            for (label, x) in &r.combo {
                let e = used.entry(*label).or_insert_with(Rational::zero);
                *e += x * &c;
                if e.is_zero() {
                    used.remove(label);
                }
            }
            cursor = Some(k);
        }
        (v, used)
    }

    /// Inserts `v` under `label`. Returns `false` if `v` was dependent.
    pub fn insert(&mut self, v: SparseVec<K>, label: usize) -> bool {
        let (rem, used) = self.reduce(v);
        let Some(pivot) = rem.keys().next().cloned() else {
            return false;
        };
        let mut combo: BTreeMap<usize, Rational> =
            used.into_iter().map(|(l, x)| (l, -x)).collect();
        combo.insert(label, Rational::one());
        self.pivots.insert(pivot, self.rows.len());
        self.rows.push(Row { vec: rem, combo });
        true
    }

    /// Coefficients `x` with `target = sum x[label] * v[label]`, if `target`
    /// lies in the span.
    pub fn solve(&self, target: SparseVec<K>) -> Option<BTreeMap<usize, Rational>> {
        let (rem, used) = self.reduce(target);
        rem.is_empty().then_some(used)
    }
}

/// Rank of a list of sparse vectors.
pub fn rank<K: Ord + Clone>(vectors: impl IntoIterator<Item = SparseVec<K>>) -> usize {
    let mut e = Echelon::new();
    for (i, v) in vectors.into_iter().enumerate() {
        e.insert(v, i);
    }
    e.rank()
}

/// Determinant of a dense square matrix by Gaussian elimination.
pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let piv = a[col][col].clone();
        det *= &piv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &piv;
            for c in col..n {
                let t = &a[col][c] * &f;
                a[r][c] -= &t;
            }
        }
    }
    det
}
