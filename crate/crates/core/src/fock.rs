//! Brute-force Fock-space oracle for n-th products.
//!
//! A state is a combination of creation-mode monomials applied to the
//! vacuum. Every generator is expanded as `x(z) = sum x(k) z^{-k-1}`, so
//! creation modes are `k <= -1`; a mode monomial reuses [`Monomial`] with a
//! factor of order `d` standing for the mode `-d-1`.
//!
//! Products of composite states come from the Borcherds iterate formula for
//! `u = a(-m) w`, with `m >= 1`:
//!
//! `u_(n) v = sum_j C(m+j-1, j) [ a(-m-j) w_(n+j) v
//!                              - (-1)^m (-1)^{|a||w|} w_(n-m-j) a(j) v ]`
//!
//! and `|0>_(n) v = delta_{n,-1} v`. Both sums are finite because no state
//! has negative weight. Nothing here calls into the symbolic OPE engine.

use std::collections::{BTreeMap, HashMap};

use crate::kernel::{Factor, FieldExpr, Monomial, Rational, Symbol};
use crate::ope;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FockError {
    #[error("weight {weight} exceeds the cutoff {cutoff}")]
    CutoffExceeded { weight: Rational, cutoff: Rational },
}

/// A finite combination of mode monomials on the vacuum. Amplitudes are
/// nonzero; odd modes never repeat within a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FockState {
    amps: BTreeMap<Monomial, Rational>,
}

impl FockState {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        let mut s = Self::zero();
        s.add(Monomial::unit(), Rational::one());
        s
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, m: &Monomial) -> Rational {
        self.amps.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.amps.entry(m.clone()).or_insert_with(Rational::zero);
        *e += &c;
        if e.is_zero() {
            self.amps.remove(&m);
        }
    }

    pub fn add_scaled(&mut self, other: &FockState, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.amps {
            self.add(m.clone(), x * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> FockState {
        let mut out = FockState::zero();
        out.add_scaled(self, c);
        out
    }

    /// Maximal weight of a monomial, in half units.
    fn max_half_weight(&self) -> i64 {
        self.amps.keys().map(half_weight).max().unwrap_or(0)
    }
}

fn half_weight(m: &Monomial) -> i64 {
    m.factors().iter().map(|f| 1 + 2 * f.order as i64).sum()
}

/// Applies the single mode `x(k)` to a state.
pub fn apply_mode(x: Symbol, k: i64, s: &FockState) -> FockState {
    let mut out = FockState::zero();
    if k <= -1 {
        let f = Factor::new(x, (-k - 1) as u16);
        for (m, c) in &s.amps {
            let word = std::iter::once(f).chain(m.factors().iter().copied());
            if let Some((prod, neg)) = Monomial::from_factors(word) {
                out.add(prod, if neg { -c } else { c.clone() });
            }
        }
        return out;
    }
    // x(k) y(-d-1) supercommutator is contraction(x, y) when k = d.
    for (m, c) in &s.amps {
        let fs = m.factors();
        let mut odd_before = 0usize;
        for (i, y) in fs.iter().enumerate() {
            if y.order as i64 == k {
                let v = x.contraction(&y.symbol);
                if v != 0 {
                    let negative = x.is_odd() && odd_before % 2 == 1;
                    let rest = fs[..i].iter().chain(fs[i + 1..].iter()).copied();
                    let (rm, neg2) = Monomial::from_factors(rest).expect("subword of a canonical word");
                    debug_assert!(!neg2);
                    let val = c * &Rational::from_int(v);
                    out.add(rm, if negative { -val } else { val });
                }
            }
            if y.is_odd() {
                odd_before += 1;
            }
        }
    }
    out
}

/// Exact mode-calculus evaluator with a weight guard and memo table.
#[derive(Debug)]
pub struct Oracle {
    cutoff: Rational,
    memo: HashMap<(Monomial, i64, Monomial), FockState>,
}

impl Oracle {
    /// Default weight cutoff.
    pub const DEFAULT_CUTOFF: i64 = 5;

    pub fn new(cutoff: Rational) -> Self {
        Oracle { cutoff, memo: HashMap::new() }
    }

    pub fn cutoff(&self) -> &Rational {
        &self.cutoff
    }

    fn check(&self, half_w: i64) -> Result<(), FockError> {
        let w = Rational::new(half_w, 2);
        if w > self.cutoff {
            return Err(FockError::CutoffExceeded { weight: w, cutoff: self.cutoff.clone() });
        }
        Ok(())
    }

    /// State of a field: `d^k a` becomes `k! a(-k-1)|0>`, and a normally
    /// ordered monomial the product of its modes on the vacuum.
    pub fn state_of(&self, e: &FieldExpr) -> Result<FockState, FockError> {
        let mut s = FockState::zero();
        for (m, c) in e.terms() {
            self.check(half_weight(m))?;
            let scale = m
                .factors()
                .iter()
                .fold(Rational::one(), |acc, f| acc * Rational::factorial(f.order as u32));
            s.add(m.clone(), c * &scale);
        }
        Ok(s)
    }

    /// The n-th product `u_(n) v`. Fails if the result weight exceeds the
    /// cutoff; never truncates silently.
    pub fn product(&mut self, u: &FockState, v: &FockState, n: i64) -> Result<FockState, FockError> {
        let mut out = FockState::zero();
        for (mu, cu) in &u.amps {
            for (mv, cv) in &v.amps {
                let hw = half_weight(mu) + half_weight(mv) - 2 * n - 2;
                if hw < 0 {
                    continue;
                }
                self.check(hw)?;
                let p = self.mono_product(mu, n, mv);
                out.add_scaled(&p, &(cu * cv));
            }
        }
        Ok(out)
    }

    fn product_state(&mut self, u: &Monomial, n: i64, v: &FockState) -> FockState {
        let mut out = FockState::zero();
        for (mv, cv) in &v.amps {
            let p = self.mono_product(u, n, mv);
            out.add_scaled(&p, cv);
        }
        out
    }

    fn mono_product(&mut self, u: &Monomial, n: i64, v: &Monomial) -> FockState {
        let hwu = half_weight(u);
        let hwv = half_weight(v);
        if hwu + hwv - 2 * n - 2 < 0 {
            return FockState::zero();
        }
        let key = (u.clone(), n, v.clone());
        if let Some(s) = self.memo.get(&key) {
            return s.clone();
        }
        let result = if u.is_empty() {
            let mut s = FockState::zero();
            if n == -1 {
                s.add(v.clone(), Rational::one());
            }
            s
        } else {
            let a = u.factors()[0];
            let w = Monomial::from_factors(u.factors()[1..].iter().copied())
                .expect("subword of a canonical word")
                .0;
            let m = a.order as i64 + 1;
            let hww = half_weight(&w);
            let vstate = {
                let mut s = FockState::zero();
                s.add(v.clone(), Rational::one());
                s
            };
            let mut out = FockState::zero();
            // a(-m-j) w_(n+j) v, nonzero only while w_(n+j) v has weight >= 0.
            let mut j = 0i64;
            while hww + hwv - 2 * (n + j) - 2 >= 0 {
                let inner = self.mono_product(&w, n + j, v);
                if !inner.is_zero() {
                    let c = Rational::binomial(&Rational::from_int(m + j - 1), j as u32);
                    out.add_scaled(&apply_mode(a.symbol, -m - j, &inner), &c);
                }
                j += 1;
            }
            // w_(n-m-j) a(j) v, nonzero only while a(j) v has weight >= 0.
            let sign_m = if m % 2 == 0 { 1 } else { -1 };
            let sign_par = if a.is_odd() && w.is_odd() { -1 } else { 1 };
            let base = Rational::from_int(-sign_m * sign_par);
            let mut j = 0i64;
            while 2 * j < hwv {
                let t = apply_mode(a.symbol, j, &vstate);
                if !t.is_zero() {
                    let inner = self.product_state(&w, n - m - j, &t);
                    let c = &base * &Rational::binomial(&Rational::from_int(m + j - 1), j as u32);
                    out.add_scaled(&inner, &c);
                }
                j += 1;
            }
            out
        };
        self.memo.insert(key, result.clone());
        result
    }

    /// `true` iff the symbolic circle product and the mode computation give
    /// the same state.
    pub fn agree(&mut self, e: &FieldExpr, f: &FieldExpr, n: i64) -> Result<bool, FockError> {
        let u = self.state_of(e)?;
        let v = self.state_of(f)?;
        let expected = self.product(&u, &v, n)?;
        let symbolic = ope::circle(e, f, n);
        let got = self.state_of(&symbolic)?;
        Ok(got == expected)
    }
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle::new(Rational::from_int(Self::DEFAULT_CUTOFF))
    }
}

/// Every mode monomial of exactly the given weight (half units) over the
/// listed symbols. Used to enumerate basis states.
pub fn basis_monomials(symbols: &[Symbol], half_w: i64) -> Vec<Monomial> {
    let mut modes: Vec<Factor> = Vec::new();
    for s in symbols {
        let mut d = 0u16;
        while (2 * d as i64) < half_w {
            modes.push(Factor::new(*s, d));
            d += 1;
        }
    }
    modes.sort();
    let mut out = Vec::new();
    fn rec(modes: &[Factor], start: usize, left: i64, cur: &mut Vec<Factor>, out: &mut Vec<Monomial>) {
        if left == 0 {
            out.push(Monomial::from_factors(cur.iter().copied()).unwrap().0);
            return;
        }
        for i in start..modes.len() {
            let f = modes[i];
            let hw = 1 + 2 * f.order as i64;
            if hw > left {
                continue;
            }
            // Odd modes may appear once; even modes repeat.
            let next = if f.is_odd() { i + 1 } else { i };
            cur.push(f);
            rec(modes, next, left - hw, cur, out);
            cur.pop();
        }
    }
    rec(&modes, 0, half_w, &mut Vec::new(), &mut out);
    out
}

/// Maximal weight of any monomial in a state.
pub fn state_weight(s: &FockState) -> Rational {
    Rational::new(s.max_half_weight(), 2)
}

/// A pair of sampled fields and a product index the two engines disagree on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleFailure {
    pub left: String,
    pub right: String,
    pub n: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub seed: u64,
    pub samples: usize,
    pub cutoff: Rational,
    pub products: (i64, i64),
    pub checked: usize,
    /// Products among `checked` with a nonzero value.
    pub nonzero: usize,
    pub failures: Vec<OracleFailure>,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// A random normally ordered combination of one to three monomials, each
/// with at least two factors and half-weight at most `max_half`.
pub fn random_composite<R: Rng>(rng: &mut R, symbols: &[Symbol], max_half: i64) -> FieldExpr {
    assert!(max_half >= 2, "composites need half-weight at least 2");
    let terms = rng.gen_range(1..=3);
    let mut out = FieldExpr::zero();
    for _ in 0..terms {
        let mut factors = Vec::new();
        let mut left = max_half;
        while left >= 1 && (factors.len() < 2 || rng.gen_bool(0.4)) {
            let order = rng.gen_range(0..=(left - 1) / 2);
            let s = symbols[rng.gen_range(0..symbols.len())];
            factors.push(FieldExpr::generator(s).nth_derivative(order as u32));
            left -= 1 + 2 * order;
        }
        if factors.len() < 2 {
            continue;
        }
        let c = Rational::new(rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..=3));
        out.add_scaled(&ope::normal_order(&factors), &c);
    }
    if out.is_zero() {
        return random_composite(rng, symbols, max_half);
    }
    out
}

/// Samples `samples` pairs of composites of weight at most `max_weight`
/// over `symbols` and compares every product `lo..=hi` against the mode
/// calculus. Sampling is sequential from `seed`; evaluation is parallel.
pub fn compare_random(
    symbols: &[Symbol],
    samples: usize,
    max_weight: &Rational,
    cutoff: &Rational,
    seed: u64,
    products: (i64, i64),
) -> Result<OracleReport, FockError> {
    let max_half = (max_weight * &Rational::from_int(2)).floor_i64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(FieldExpr, FieldExpr)> = (0..samples)
        .map(|_| (random_composite(&mut rng, symbols, max_half), random_composite(&mut rng, symbols, max_half)))
        .collect();
    let results = pairs
        .par_iter()
        .map(|(e, f)| {
            let mut oracle = Oracle::new(cutoff.clone());
            let mut bad = Vec::new();
            let mut nonzero = 0;
            for n in products.0..=products.1 {
                if !ope::circle(e, f, n).is_zero() {
                    nonzero += 1;
                }
                if !oracle.agree(e, f, n)? {
                    bad.push(OracleFailure { left: crate::syntax::render(e), right: crate::syntax::render(f), n });
                }
            }
            Ok((bad, nonzero))
        })
        .collect::<Result<Vec<_>, FockError>>()?;
    let checked = samples * (products.1 - products.0 + 1).max(0) as usize;
    let nonzero = results.iter().map(|r| r.1).sum();
    Ok(OracleReport {
        seed,
        samples,
        cutoff: cutoff.clone(),
        products,
        checked,
        nonzero,
        failures: results.into_iter().flat_map(|r| r.0).collect(),
    })
}
