//! Exhaustive search for Darboux polynomials over a finite coefficient grid.
//!
//! Candidates are screened on a random line modulo a prime: if `v | D[v]`
//! then the restrictions satisfy `v(t) | D[v](t)`. Survivors are checked
//! exactly.

use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ode::Ode2;
use crate::poly::{inv_mod, mod_bigint, mulmod, powmod, Coeff, Monomial, Polynomial, Symbol};

use super::{cofactor, DarbouxPair, Provenance};

const PRIME: u64 = 2_305_843_009_213_693_951;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzBounds {
    /// Total degree in `x`, `y`, `z`.
    pub max_deg: u32,
    /// Largest absolute value of an integer coefficient.
    pub coeff_bound: u32,
    /// Total degree of the parameter monomial multiplying each term.
    pub param_deg: u32,
    /// Largest number of terms in a candidate.
    pub max_terms: usize,
    pub max_candidates: Option<u64>,
    pub deadline: Option<Instant>,
}

impl AnsatzBounds {
    pub fn new(max_deg: u32, coeff_bound: u32, param_deg: u32) -> AnsatzBounds {
        AnsatzBounds { max_deg, coeff_bound, param_deg, max_terms: 4, max_candidates: None, deadline: None }
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> AnsatzBounds {
        self.max_terms = max_terms;
        self
    }
}

#[derive(Clone, Debug)]
pub struct AnsatzResult {
    pub pairs: Vec<DarbouxPair>,
    /// Set when a resource bound stopped the enumeration early.
    pub truncated: bool,
    pub examined: u64,
}

/// All Darboux polynomials of the grid, in enumeration order: by number of
/// terms, then by support, then by coefficients.
pub fn ansatz_search(ode: &Ode2, bounds: &AnsatzBounds) -> AnsatzResult {
    let mut result = AnsatzResult { pairs: Vec::new(), truncated: false, examined: 0 };
    if bounds.coeff_bound == 0 || bounds.max_deg == 0 || bounds.max_terms == 0 {
        return result;
    }
    let basis = basis(ode, bounds.max_deg, bounds.param_deg);
    let line = Line::new(ode, 0x5eed);
    let images: Vec<(Vec<u64>, Vec<u64>)> = basis.iter().map(|b| line.images(b)).collect();
    let cb = bounds.coeff_bound as i64;
    let values: Vec<i64> = (1..=cb).flat_map(|c| [c, -c]).collect();

    let mut seen: HashSet<Polynomial> = HashSet::new();
    let n = basis.len();
    'outer: for k in 1..=bounds.max_terms.min(n) {
        let mut support: Vec<usize> = (0..k).collect();
        loop {
            if support.iter().any(|&i| basis[i].has_main()) {
                let mut coeffs: Vec<usize> = vec![0; k];
                loop {
                    result.examined += 1;
                    if result.examined % 4096 == 0 && out_of_budget(bounds, result.examined) {
                        result.truncated = true;
                        break 'outer;
                    }
                    let cs: Vec<i64> = coeffs.iter().map(|&j| values[j]).collect();
                    if line.passes(&images, &support, &cs) {
                        let v = Polynomial::from_terms(
                            support.iter().zip(&cs).map(|(&i, &c)| (basis[i].clone(), Coeff::from_integer(c.into()))),
                        );
                        let norm = v.main_primitive();
                        if seen.insert(norm.clone()) {
                            if let Ok((v, g)) = cofactor(ode, &norm) {
                                result.pairs.push(DarbouxPair { v, g, provenance: Provenance::Ansatz });
                            }
                        }
                    }
                    // The first coefficient stays positive: v and -v agree.
                    if !advance(&mut coeffs, values.len(), |i| if i == 0 { 2 } else { 1 }) {
                        break;
                    }
                }
            }
            if !next_combination(&mut support, n) {
                break;
            }
        }
    }
    if let Some(max) = bounds.max_candidates {
        result.truncated |= result.examined > max;
    }
    result
}

fn out_of_budget(bounds: &AnsatzBounds, examined: u64) -> bool {
    bounds.max_candidates.is_some_and(|m| examined > m) || bounds.deadline.is_some_and(|d| Instant::now() >= d)
}

/// Odometer over `coeffs`; position `i` steps by `step(i)` so position 0
/// visits only the positive values.
fn advance(coeffs: &mut [usize], len: usize, step: impl Fn(usize) -> usize) -> bool {
    for i in (0..coeffs.len()).rev() {
        coeffs[i] += step(i);
        if coeffs[i] < len {
            return true;
        }
        coeffs[i] = 0;
    }
    false
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Main monomials of degree at most `max_deg` times parameter monomials of
/// degree at most `param_deg`, lowest degree first.
fn basis(ode: &Ode2, max_deg: u32, param_deg: u32) -> Vec<Monomial> {
    let main = monomials(&Symbol::main_variables(), max_deg);
    let params = monomials(&ode.parameters(), param_deg);
    let mut out = Vec::with_capacity(main.len() * params.len());
    for m in &main {
        for p in &params {
            out.push(m.mul(p));
        }
    }
    out
}

fn monomials(vars: &[Symbol], max_deg: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut layer = vec![Monomial::one()];
    for _ in 0..max_deg {
        let mut next: Vec<Monomial> = Vec::new();
        for m in &layer {
            for v in vars {
                let t = m.mul(&Monomial::var(v.clone()));
                if !next.contains(&t) {
                    next.push(t);
                }
            }
        }
        next.sort_by(|a, b| b.cmp(a));
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// A random line `t -> (x0 + a t, y0 + b t, z0 + c t)` with random parameter
/// values, everything modulo `PRIME`.
struct Line {
    x: [u64; 2],
    y: [u64; 2],
    z: [u64; 2],
    params: Vec<(Symbol, u64)>,
    n: Option<Vec<u64>>,
    m: Option<Vec<u64>>,
}

impl Line {
    fn new(ode: &Ode2, seed: u64) -> Line {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut r = || rng.gen_range(1..PRIME);
        let (x, y, z) = ([r(), r()], [r(), r()], [r(), r()]);
        let params = ode.parameters().into_iter().map(|p| (p, r())).collect();
        let mut line = Line { x, y, z, params, n: None, m: None };
        line.n = line.restrict(ode.n());
        line.m = line.restrict(ode.m());
        line
    }

    fn restrict(&self, p: &Polynomial) -> Option<Vec<u64>> {
        let pb = num_bigint::BigInt::from(PRIME);
        let mut acc: Vec<u64> = Vec::new();
        for (m, c) in p.terms() {
            let d = mod_bigint(c.denom(), &pb);
            if d == 0 {
                return None;
            }
            let mut scalar = mulmod(mod_bigint(c.numer(), &pb), inv_mod(d, PRIME), PRIME);
            let mut t = vec![1u64];
            for (s, e) in m.pairs() {
                let lin = match s.name() {
                    "x" => self.x,
                    "y" => self.y,
                    "z" => self.z,
                    _ => {
                        let v = self.params.iter().find(|(q, _)| q == s).map(|(_, v)| *v)?;
                        scalar = mulmod(scalar, powmod(v, *e as u64, PRIME), PRIME);
                        continue;
                    }
                };
                for _ in 0..*e {
                    t = mul(&t, &lin);
                }
            }
            add_scaled(&mut acc, &t, scalar);
        }
        Some(acc)
    }

    /// Restrictions of `B` and of `D[B]` for a basis monomial `B`.
    fn images(&self, b: &Monomial) -> (Vec<u64>, Vec<u64>) {
        let bp = Polynomial::term(Coeff::from_integer(1.into()), b.clone());
        let (Some(n), Some(m)) = (&self.n, &self.m) else {
            return (Vec::new(), Vec::new());
        };
        let r = |p: &Polynomial| self.restrict(p).unwrap_or_default();
        let bx = r(&bp.partial(&Symbol::x()));
        let by = r(&bp.partial(&Symbol::y()));
        let bz = r(&bp.partial(&Symbol::z()));
        let mut inner = bx;
        add_scaled(&mut inner, &mul(&by, &self.z), 1);
        let mut d = mul(n, &inner);
        add_scaled(&mut d, &mul(m, &bz), 1);
        (r(&bp), d)
    }

    fn passes(&self, images: &[(Vec<u64>, Vec<u64>)], support: &[usize], coeffs: &[i64]) -> bool {
        if self.n.is_none() || self.m.is_none() {
            return true;
        }
        let mut v: Vec<u64> = Vec::new();
        let mut dv: Vec<u64> = Vec::new();
        for (&i, &c) in support.iter().zip(coeffs) {
            let c = if c >= 0 { c as u64 } else { PRIME - (-c) as u64 };
            add_scaled(&mut v, &images[i].0, c);
            add_scaled(&mut dv, &images[i].1, c);
        }
        trim(&mut v);
        trim(&mut dv);
        if v.len() <= 1 || dv.is_empty() {
            return true;
        }
        remainder_is_zero(dv, &v)
    }
}

fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, PRIME)) % PRIME;
        }
    }
    out
}

fn add_scaled(acc: &mut Vec<u64>, p: &[u64], c: u64) {
    if acc.len() < p.len() {
        acc.resize(p.len(), 0);
    }
    for (a, &x) in acc.iter_mut().zip(p) {
        *a = (*a + mulmod(x, c, PRIME)) % PRIME;
    }
}

fn remainder_is_zero(mut r: Vec<u64>, v: &[u64]) -> bool {
    let dv = v.len() - 1;
    let inv = inv_mod(v[dv], PRIME);
    while r.len() > dv {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let f = mulmod(lead, inv, PRIME);
            let shift = r.len() - 1 - dv;
            for (j, &c) in v.iter().enumerate() {
                let t = mulmod(f, c, PRIME);
                r[shift + j] = (r[shift + j] + PRIME - t) % PRIME;
            }
        }
        r.pop();
    }
    r.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse::{parse_ode, parse_polynomial};

    const EX1: &str = "-(1/2)*(2*z+3)*(3*z*y^2+z+x-y^3-y-1)/(x-y^3-y)";

    fn contains(r: &AnsatzResult, s: &str) -> bool {
        let v = parse_polynomial(s).unwrap().main_primitive();
        r.pairs.iter().any(|p| p.v() == &v)
    }

    #[test]
    fn degree_one_grid() {
        let ode = parse_ode(EX1).unwrap();
        let r = ansatz_search(&ode, &AnsatzBounds::new(1, 3, 0));
        assert!(contains(&r, "2*z+3"));
        assert!(!r.truncated);
        for p in &r.pairs {
            assert_eq!(&(p.g() * p.v()), &ode.apply_d(p.v()));
        }
    }

    #[test]
    fn degree_three_grid() {
        let ode = parse_ode(EX1).unwrap();
        let r = ansatz_search(&ode, &AnsatzBounds::new(3, 1, 0).with_max_terms(3));
        assert!(contains(&r, "x-y^3-y"));
    }

    #[test]
    fn empty_grid() {
        let ode = parse_ode(EX1).unwrap();
        assert!(ansatz_search(&ode, &AnsatzBounds::new(1, 0, 0)).pairs.is_empty());
    }

    #[test]
    fn budget_truncates() {
        let ode = parse_ode(EX1).unwrap();
        let mut b = AnsatzBounds::new(3, 1, 0);
        b.max_candidates = Some(5000);
        let r = ansatz_search(&ode, &b);
        assert!(r.truncated);
    }

    #[test]
    fn combinations_and_odometer() {
        let mut c = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut c, 4) {
            count += 1;
        }
        assert_eq!(count, 6);
        let mut o = vec![0, 0];
        let mut seen = 1;
        while advance(&mut o, 4, |i| if i == 0 { 2 } else { 1 }) {
            seen += 1;
        }
        assert_eq!(seen, 8);
    }
}
