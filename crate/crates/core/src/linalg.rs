//! Exact homogeneous linear systems whose entries are polynomials in the
//! parameters, solved over the field of rational functions in those
//! parameters.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::poly::{gcd, gcd_many, inv_mod, mulmod, Coeff, Polynomial, RationalExpr, Symbol};

/// A sparse row: column index to nonzero entry.
pub type Row = BTreeMap<usize, Polynomial>;

const PRIME: u64 = 2_305_843_009_213_693_951;

/// Rank of the system after substituting pseudo-random values for every
/// symbol, modulo a large prime. Never exceeds the generic rank. `None` when a
/// coefficient denominator vanishes modulo the prime.
pub fn rank_mod_p(rows: &[Row], ncols: usize, seed: u64) -> Option<usize> {
    let symbols: BTreeSet<Symbol> = rows
        .iter()
        .flat_map(|r| r.values().flat_map(|p| p.symbols()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: BTreeMap<Symbol, u64> = symbols.into_iter().map(|s| (s, rng.gen_range(2..PRIME))).collect();
    let lookup = |s: &Symbol| values[s];
    let mut m: Vec<Vec<u64>> = Vec::with_capacity(rows.len());
    for r in rows {
        let mut dense = vec![0u64; ncols];
        for (c, p) in r {
            dense[*c] = p.eval_mod(PRIME, &lookup)?;
        }
        m.push(dense);
    }
    Some(rank_dense(m, ncols, PRIME))
}

/// Rank of a dense matrix of residues modulo the prime `p`.
pub(crate) fn rank_dense(mut m: Vec<Vec<u64>>, ncols: usize, p: u64) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(rank, piv);
        let inv = inv_mod(m[rank][col], p);
        for i in rank + 1..m.len() {
            let f = mulmod(m[i][col], inv, p);
            if f == 0 {
                continue;
            }
            for j in col..ncols {
                let t = mulmod(f, m[rank][j], p);
                m[i][j] = (m[i][j] + p - t) % p;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// True when the system certainly has only the trivial solution.
pub fn only_trivial(rows: &[Row], ncols: usize) -> bool {
    (0..3u64).any(|seed| rank_mod_p(rows, ncols, seed) == Some(ncols))
}

/// A basis of the nullspace, each vector scaled to polynomial entries without
/// common factor. Columns are pivoted in increasing order, so basis vectors
/// follow the order of the free columns.
pub fn nullspace(rows: Vec<Row>, ncols: usize) -> Vec<Vec<Polynomial>> {
    let mut rows: Vec<Row> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    let mut pivots: Vec<(usize, Row)> = Vec::new();
    for col in 0..ncols {
        let best = rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.get(&col).map(|p| (i, p)))
            .min_by_key(|(_, p)| (p.num_terms(), p.total_degree()))
            .map(|(i, _)| i);
        let Some(i) = best else { continue };
        let prow = rows.swap_remove(i);
        for r in rows.iter_mut().chain(pivots.iter_mut().map(|(_, r)| r)) {
            if r.contains_key(&col) {
                *r = eliminate(r, &prow, col);
            }
        }
        rows.retain(|r| !r.is_empty());
        pivots.push((col, prow));
    }

    let pivot_cols: BTreeSet<usize> = pivots.iter().map(|(c, _)| *c).collect();
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![RationalExpr::zero(); ncols];
        v[free] = RationalExpr::one();
        for (c, r) in &pivots {
            if let Some(a) = r.get(&free) {
                v[*c] = RationalExpr::new(-a, r[c].clone()).unwrap();
            }
        }
        basis.push(clear_denominators(&v));
    }
    basis
}

/// `p * r - r[col] * prow` with `p = prow[col]`, divided by its content.
fn eliminate(r: &Row, prow: &Row, col: usize) -> Row {
    let p = &prow[&col];
    let f = &r[&col];
    let mut out: Row = BTreeMap::new();
    for (c, e) in r {
        if *c != col {
            out.insert(*c, p * e);
        }
    }
    for (c, e) in prow {
        if *c == col {
            continue;
        }
        let t = f * e;
        let s = match out.remove(c) {
            Some(x) => &x - &t,
            None => -t,
        };
        if !s.is_zero() {
            out.insert(*c, s);
        }
    }
    let g = gcd_many(out.values());
    if !g.is_zero() && !g.is_one() {
        for e in out.values_mut() {
            *e = e.exact_divide(&g).expect("content divides");
        }
    }
    out
}

/// Scales a vector of rational expressions to polynomials with no common
/// polynomial factor and coprime integer coefficients.
pub fn clear_denominators(v: &[RationalExpr]) -> Vec<Polynomial> {
    let mut lcm = Polynomial::one();
    for e in v {
        let d = e.den();
        if !d.is_constant() {
            let g = gcd(&lcm, d).unwrap();
            lcm = &lcm * &d.exact_divide(&g).unwrap();
        }
    }
    let mut out: Vec<Polynomial> = v
        .iter()
        .map(|e| (e.num() * &lcm).exact_divide(e.den()).unwrap())
        .collect();
    let g = gcd_many(out.iter());
    if !g.is_zero() && !g.is_one() {
        out = out.iter().map(|p| p.exact_divide(&g).unwrap()).collect();
    }
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for p in out.iter().filter(|p| !p.is_zero()) {
        let c = p.rational_content();
        num = num.gcd(c.numer());
        den = den.lcm(c.denom());
    }
    if !num.is_zero() {
        let s = Coeff::new(den, num);
        out = out.iter().map(|p| p.scale(&s)).collect();
    }
    out
}
