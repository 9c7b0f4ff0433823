//! Exponents `m_i` and polynomials `P`, `Q` with
//!
//! ```text
//! P S + D[P] + Q (N M_y - M N_y) = 0
//! Q S + D[Q] + P + Q (N_x + z N_y + M_z) = 0
//! ```
//!
//! where `S = sum m_i g_i`. The second identity gives `P` from `Q`; for fixed
//! `m` the first is then linear in the coefficients of `Q`.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::darboux::DarbouxPair;
use crate::linalg::{nullspace, only_trivial, rank_dense, Row};
use crate::ode::Ode2;
use crate::poly::{content_wrt, gcd, Coeff, Monomial, Polynomial, RationalExpr, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PsError {
    #[error("no Darboux pairs to combine")]
    NoPairs,
    #[error("exponent grid has {0} points, more than the limit {1}")]
    GridTooLarge(u128, u128),
    #[error("deadline passed")]
    Deadline,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsSolution {
    pub pairs: Vec<DarbouxPair>,
    pub exponents: Vec<Coeff>,
    pub p: Polynomial,
    pub q: Polynomial,
}

/// Integrating factor `prod v_i^m_i`, kept factored. Factors with zero
/// exponent are omitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerProduct {
    pub factors: Vec<(Polynomial, Coeff)>,
}

/// Candidate exponents for each pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentGrid {
    values: Vec<Coeff>,
}

impl ExponentGrid {
    /// `n/d` with `|n/d| <= max_abs` and `d` in `dens`, deduplicated and
    /// ordered by denominator, then absolute value, negative first.
    pub fn new(max_abs: i64, dens: &[i64]) -> ExponentGrid {
        let mut values: Vec<Coeff> = Vec::new();
        for &d in dens {
            for n in -max_abs * d..=max_abs * d {
                let v = Coeff::new(BigInt::from(n), BigInt::from(d));
                if !values.contains(&v) {
                    values.push(v);
                }
            }
        }
        values.sort_by(|a, b| {
            (a.denom(), a.abs(), a.is_positive()).cmp(&(b.denom(), b.abs(), b.is_positive()))
        });
        ExponentGrid { values }
    }

    pub fn from_values(values: Vec<Coeff>) -> ExponentGrid {
        ExponentGrid { values }
    }

    pub fn values(&self) -> &[Coeff] {
        &self.values
    }

    /// Exponent vectors for `k` pairs, not all zero, simplest first: by
    /// largest denominator, then by the sum of absolute values, then by grid
    /// position.
    pub fn vectors(&self, k: usize) -> Vec<Vec<Coeff>> {
        let mut idx = vec![0usize; k];
        let mut out: Vec<(Vec<usize>, Vec<Coeff>)> = Vec::new();
        loop {
            let v: Vec<Coeff> = idx.iter().map(|&i| self.values[i].clone()).collect();
            if v.iter().any(|c| !c.is_zero()) {
                out.push((idx.clone(), v));
            }
            let mut i = k;
            loop {
                if i == 0 {
                    out.sort_by_cached_key(|(i, v)| (key(v), i.clone()));
                    return out.into_iter().map(|(_, v)| v).collect();
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < self.values.len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    pub fn size(&self, k: usize) -> u128 {
        (self.values.len() as u128).saturating_pow(k as u32)
    }
}

fn key(v: &[Coeff]) -> (BigInt, Coeff) {
    let den = v.iter().map(|c| c.denom().clone()).max().unwrap_or_else(BigInt::one);
    let total = v.iter().map(|c| c.abs()).fold(Coeff::zero(), |a, b| a + b);
    (den, total)
}

impl Default for ExponentGrid {
    fn default() -> ExponentGrid {
        ExponentGrid::new(3, &[1, 2])
    }
}

#[derive(Clone, Debug)]
pub struct SolveBounds {
    pub grid: ExponentGrid,
    /// Total degree bound for `P` and `Q` in `x`, `y`, `z`.
    pub deg_bound: u32,
    /// Only this degree level of `Q` when set.
    pub q_level: Option<u32>,
    pub max_grid_points: u128,
    pub deadline: Option<Instant>,
}

impl SolveBounds {
    pub fn for_ode(ode: &Ode2) -> SolveBounds {
        SolveBounds { grid: ExponentGrid::default(), deg_bound: ode.degree() + 1, q_level: None, max_grid_points: 1_000_000, deadline: None }
    }
}

/// Every solution in the bounds, ordered by the degree of `Q`, then exponent
/// vector, then nullspace basis vector.
pub fn solve_pq(ode: &Ode2, pairs: &[DarbouxPair], bounds: &SolveBounds) -> Result<Vec<PsSolution>, PsError> {
    let mut out = Vec::new();
    solve_pq_with(ode, pairs, bounds, |s| {
        out.push(s);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Calls `visit` on each solution in order until it returns `Break`.
pub fn solve_pq_with(
    ode: &Ode2,
    pairs: &[DarbouxPair],
    bounds: &SolveBounds,
    mut visit: impl FnMut(PsSolution) -> ControlFlow<()>,
) -> Result<(), PsError> {
    if pairs.is_empty() {
        return Err(PsError::NoPairs);
    }
    let size = bounds.grid.size(pairs.len());
    if size > bounds.max_grid_points {
        return Err(PsError::GridTooLarge(size, bounds.max_grid_points));
    }
    let vectors = bounds.grid.vectors(pairs.len());
    let residues: Vec<Option<Vec<u64>>> = vectors
        .iter()
        .map(|m| m.iter().map(|c| Polynomial::constant(c.clone()).eval_mod(SKETCH_PRIME, &|_| 0)).collect())
        .collect();
    let ctx = Context::new(ode, pairs);
    let mut parts: Vec<Parts> = Vec::new();
    let levels = match bounds.q_level {
        Some(d) => d.min(bounds.deg_bound)..=d.min(bounds.deg_bound),
        None => 0..=bounds.deg_bound,
    };
    for dq in levels {
        let basis = main_monomials(dq);
        parts.extend(basis[parts.len()..].iter().map(|mu| ctx.parts(mu)));
        let sketch = Sketch::new(&parts, pairs.len(), bounds.deg_bound);
        for (m, r) in vectors.iter().zip(&residues) {
            if bounds.deadline.is_some_and(|d| Instant::now() > d) {
                return Err(PsError::Deadline);
            }
            if let (Some(s), Some(r)) = (&sketch, r) {
                if s.full_rank(r) {
                    continue;
                }
            }
            for sol in ctx.solve(&basis, &parts, m, bounds.deg_bound) {
                if visit(sol).is_break() {
                    return Ok(());
                }
            }
        }
    }
    Ok(())
}

/// Main monomials of total degree at most `d`, lowest first.
fn main_monomials(d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for total in 0..=d {
        let mut layer = Vec::new();
        for i in 0..=total {
            for j in 0..=total - i {
                let k = total - i - j;
                layer.push(Monomial::from_pairs([(Symbol::x(), i), (Symbol::y(), j), (Symbol::z(), k)]));
            }
        }
        layer.sort_by(|a, b| b.cmp(a));
        out.extend(layer);
    }
    out
}

struct Context<'a> {
    ode: &'a Ode2,
    pairs: &'a [DarbouxPair],
    t: Polynomial,
    w: Polynomial,
}

/// `P = p0 + sum m_i p[i]` and
/// `E = e0 + sum m_i e1[i] + sum_{i <= k} m_i m_k e2[(i, k)]` for `Q = mu`.
struct Parts {
    p0: Polynomial,
    p: Vec<Polynomial>,
    e0: Polynomial,
    e1: Vec<Polynomial>,
    e2: BTreeMap<(usize, usize), Polynomial>,
}

impl<'a> Context<'a> {
    fn new(ode: &'a Ode2, pairs: &'a [DarbouxPair]) -> Context<'a> {
        let (x, y, z) = (Symbol::x(), Symbol::y(), Symbol::z());
        let (m, n) = (ode.m(), ode.n());
        let t = &(&n.partial(&x) + &(&Polynomial::var(z.clone()) * &n.partial(&y))) + &m.partial(&z);
        let w = &(n * &m.partial(&y)) - &(m * &n.partial(&y));
        Context { ode, pairs, t, w }
    }

    fn parts(&self, mu: &Monomial) -> Parts {
        let muq = Polynomial::term(Coeff::one(), mu.clone());
        let d = |p: &Polynomial| self.ode.apply_d(p);
        let p0 = -&(&d(&muq) + &(&muq * &self.t));
        let p: Vec<Polynomial> = self.pairs.iter().map(|pr| -&(&muq * pr.g())).collect();
        let e0 = &d(&p0) + &(&muq * &self.w);
        let e1 = self
            .pairs
            .iter()
            .zip(&p)
            .map(|(pr, pi)| &(&p0 * pr.g()) + &d(pi))
            .collect();
        let mut e2 = BTreeMap::new();
        for i in 0..self.pairs.len() {
            for k in i..self.pairs.len() {
                let gg = self.pairs[i].g() * self.pairs[k].g();
                let f = if i == k { -1 } else { -2 };
                e2.insert((i, k), (&muq * &gg).scale(&Coeff::from_integer(f.into())));
            }
        }
        Parts { p0, p, e0, e1, e2 }
    }

    fn solve(&self, basis: &[Monomial], parts: &[Parts], m: &[Coeff], deg_bound: u32) -> Vec<PsSolution> {
        let mut rows: BTreeMap<(u8, Monomial), Row> = BTreeMap::new();
        for (j, pt) in parts.iter().enumerate() {
            let mut e = pt.e0.clone();
            let mut p = pt.p0.clone();
            for (i, mi) in m.iter().enumerate() {
                if mi.is_zero() {
                    continue;
                }
                e = &e + &pt.e1[i].scale(mi);
                p = &p + &pt.p[i].scale(mi);
                for k in i..m.len() {
                    if !m[k].is_zero() {
                        e = &e + &pt.e2[&(i, k)].scale(&(mi * &m[k]));
                    }
                }
            }
            for (mono, c) in e.coefficients_in(Symbol::is_main) {
                rows.entry((0, mono)).or_default().insert(j, c);
            }
            for (mono, c) in p.coefficients_in(Symbol::is_main) {
                if mono.main_degree() > deg_bound {
                    rows.entry((1, mono)).or_default().insert(j, c);
                }
            }
        }
        let rows: Vec<Row> = rows.into_values().collect();
        if only_trivial(&rows, basis.len()) {
            return Vec::new();
        }
        let s: Polynomial = self.pairs.iter().zip(m).map(|(pr, mi)| pr.g().scale(mi)).sum();
        let mut out = Vec::new();
        for v in nullspace(rows, basis.len()) {
            let q: Polynomial = basis
                .iter()
                .zip(&v)
                .map(|(mu, c)| c.mul_monomial(mu))
                .sum();
            if q.is_zero() {
                continue;
            }
            let p = -&(&(&(&q * &s) + &self.ode.apply_d(&q)) + &(&q * &self.t));
            if let Some(sol) = self.accept(p, q, m) {
                out.push(sol);
            }
        }
        out
    }

    fn accept(&self, p: Polynomial, q: Polynomial, m: &[Coeff]) -> Option<PsSolution> {
        let g = gcd(&p, &q).ok()?;
        if !g.is_free_of_main() {
            return None;
        }
        let (p, q) = normalize_scale(p, q);
        let sol = PsSolution { pairs: self.pairs.to_vec(), exponents: m.to_vec(), p, q };
        debug_assert!(residuals(self.ode, &sol).iter().all(Polynomial::is_zero));
        Some(sol)
    }
}

const SKETCH_PRIME: u64 = 2_147_483_647;

/// The system of [`Context::solve`] with every symbol replaced by a
/// pseudo-random residue, split by monomial in `m`: term 0 is constant,
/// then `m_i`, then `m_i m_k` for `i <= k`. Tall systems are compressed to
/// random combinations of their rows, which can only lower the rank.
struct Sketch {
    ncols: usize,
    npairs: usize,
    mats: Vec<Vec<Vec<u64>>>,
}

impl Sketch {
    fn new(parts: &[Parts], npairs: usize, deg_bound: u32) -> Option<Sketch> {
        let quad: Vec<(usize, usize)> = (0..npairs).flat_map(|i| (i..npairs).map(move |k| (i, k))).collect();
        let nterms = 1 + npairs + quad.len();
        let mut keys: BTreeMap<(u8, Monomial), usize> = BTreeMap::new();
        let mut entries = Vec::new();
        for (j, pt) in parts.iter().enumerate() {
            let mut polys: Vec<(u8, usize, &Polynomial)> = vec![(0, 0, &pt.e0), (1, 0, &pt.p0)];
            for i in 0..npairs {
                polys.push((0, 1 + i, &pt.e1[i]));
                polys.push((1, 1 + i, &pt.p[i]));
            }
            for (t, ik) in quad.iter().enumerate() {
                polys.push((0, 1 + npairs + t, &pt.e2[ik]));
            }
            for (kind, t, poly) in polys {
                for (mono, c) in poly.coefficients_in(Symbol::is_main) {
                    if kind == 1 && mono.main_degree() <= deg_bound {
                        continue;
                    }
                    let n = keys.len();
                    let row = *keys.entry((kind, mono)).or_insert(n);
                    entries.push((t, row, j, c));
                }
            }
        }
        let symbols: BTreeSet<Symbol> = entries.iter().flat_map(|e| e.3.symbols()).collect();
        let prime = SKETCH_PRIME;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5ce7c4);
        let values: BTreeMap<Symbol, u64> = symbols.into_iter().map(|s| (s, rng.gen_range(2..prime))).collect();
        let mut mats = vec![vec![vec![0u64; parts.len()]; keys.len()]; nterms];
        for (t, row, j, c) in entries {
            mats[t][row][j] = c.eval_mod(prime, &|s| values[s])?;
        }
        let k = parts.len() + 2;
        if keys.len() > k {
            let mix: Vec<Vec<u64>> = (0..k).map(|_| (0..keys.len()).map(|_| rng.gen_range(0..prime)).collect()).collect();
            for mat in &mut mats {
                *mat = mix
                    .iter()
                    .map(|s| {
                        (0..parts.len())
                            .map(|j| s.iter().zip(mat.iter()).fold(0, |acc, (a, r)| (acc + a * r[j]) % prime))
                            .collect()
                    })
                    .collect();
            }
        }
        Some(Sketch { ncols: parts.len(), npairs, mats })
    }

    /// True when the system for `m`, given by its residues, certainly has
    /// only the trivial solution.
    fn full_rank(&self, mp: &[u64]) -> bool {
        let mut weights = vec![1u64];
        weights.extend(mp);
        for i in 0..self.npairs {
            for k in i..self.npairs {
                weights.push(mp[i] * mp[k] % SKETCH_PRIME);
            }
        }
        let rows = self.mats.first().map_or(0, Vec::len);
        let mut a = vec![vec![0u64; self.ncols]; rows];
        for (w, mat) in weights.iter().zip(&self.mats) {
            if *w == 0 {
                continue;
            }
            for (ar, mr) in a.iter_mut().zip(mat) {
                for (x, y) in ar.iter_mut().zip(mr) {
                    *x = (*x + w * y) % SKETCH_PRIME;
                }
            }
        }
        rank_dense(a, self.ncols, SKETCH_PRIME) == self.ncols
    }
}

/// Scales `(P, Q)` so that `Q` has no content free of `x`, `y`, `z` when
/// that keeps `P` polynomial, then so that `Q` is canonical.
fn normalize_scale(p: Polynomial, q: Polynomial) -> (Polynomial, Polynomial) {
    let (c, _) = content_wrt(&q, &Symbol::main_variables());
    let (p, q) = match p.exact_divide(&c) {
        Ok(pc) if !c.is_constant() => (pc, q.exact_divide(&c).unwrap()),
        _ => (p, q),
    };
    let u = q.canonical_unit().recip();
    (p.scale(&u), q.scale(&u))
}

/// Both compatibility residuals; zero for a valid solution.
pub fn residuals(ode: &Ode2, sol: &PsSolution) -> [Polynomial; 2] {
    let ctx = Context::new(ode, &sol.pairs);
    let s: Polynomial = sol.pairs.iter().zip(&sol.exponents).map(|(pr, mi)| pr.g().scale(mi)).sum();
    let (p, q) = (&sol.p, &sol.q);
    let r1 = &(&(p * &s) + &ode.apply_d(p)) + &(q * &ctx.w);
    let r2 = &(&(&(q * &s) + &ode.apply_d(q)) + p) + &(q * &ctx.t);
    [r1, r2]
}

/// `R = prod v_i^m_i`.
pub fn integrating_factor(sol: &PsSolution) -> PowerProduct {
    PowerProduct {
        factors: sol
            .pairs
            .iter()
            .zip(&sol.exponents)
            .filter(|(_, m)| !m.is_zero())
            .map(|(pr, m)| (pr.v().clone(), m.clone()))
            .collect(),
    }
}

impl PowerProduct {
    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// `D[R]/R = sum m_i D[v_i]/v_i`.
    pub fn log_derivative(&self, ode: &Ode2) -> RationalExpr {
        self.factors.iter().fold(RationalExpr::zero(), |acc, (v, m)| {
            acc.add(&RationalExpr::new(ode.apply_d(v).scale(m), v.clone()).unwrap())
        })
    }

    /// `R` as a rational function; `None` with a non-integer exponent.
    pub fn to_rational(&self) -> Option<RationalExpr> {
        let mut acc = RationalExpr::one();
        for (v, m) in &self.factors {
            if !m.is_integer() {
                return None;
            }
            let k: i32 = i32::try_from(m.to_integer()).ok()?;
            acc = acc.mul(&RationalExpr::from_poly(v.clone()).pow(k).ok()?);
        }
        Some(acc)
    }
}
