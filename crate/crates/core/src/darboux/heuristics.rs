//! Extractors reading Darboux candidates off the structure of `M` and `N`.

use crate::ode::Ode2;
use crate::poly::{content_wrt, factor_limited, Polynomial, Symbol};

use super::{verified, DarbouxPair, Provenance};

/// Largest number of terms split additively by the H3 and H4 extractors.
pub const MAX_SPLIT_TERMS: usize = 10;

/// Constant multipliers tried when combining a `z` part with an `(x, y)` part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleGrid {
    elements: Vec<Polynomial>,
}

impl ScaleGrid {
    /// Every element must be free of `x`, `y`, `z` and nonzero.
    pub fn new(elements: Vec<Polynomial>) -> ScaleGrid {
        assert!(elements.iter().all(|e| !e.is_zero() && e.is_free_of_main()));
        let mut out: Vec<Polynomial> = Vec::new();
        for e in elements {
            if !out.contains(&e) {
                out.push(e);
            }
        }
        ScaleGrid { elements: out }
    }

    pub fn elements(&self) -> &[Polynomial] {
        &self.elements
    }

    /// Products of two grid elements (one of which may be 1), deduplicated in
    /// first-seen order.
    pub fn multipliers(&self) -> Vec<Polynomial> {
        let mut base = vec![Polynomial::one()];
        base.extend(self.elements.iter().cloned());
        let mut out: Vec<Polynomial> = Vec::new();
        for (i, p) in base.iter().enumerate() {
            for q in &base[i..] {
                let r = p * q;
                if !out.contains(&r) {
                    out.push(r);
                }
            }
        }
        out
    }
}

/// `{1, -1}` together with `p` and `-p` for each parameter of the equation.
pub fn default_scale_grid(ode: &Ode2) -> ScaleGrid {
    let mut v = vec![Polynomial::one(), Polynomial::from_int(-1)];
    for p in ode.parameters() {
        let q = Polynomial::var(p);
        v.push(-&q);
        v.push(q);
    }
    ScaleGrid::new(v)
}

/// H1: factors of the `z`-free content of `N`.
pub fn heuristic_n_xy(ode: &Ode2) -> Vec<DarbouxPair> {
    let (content, _) = content_wrt(ode.n(), &[Symbol::z()]);
    content_factors(ode, &content, Provenance::NFactor)
}

/// H2: factors of the `(x, y)`-free content of `M`.
pub fn heuristic_m_z(ode: &Ode2) -> Vec<DarbouxPair> {
    if ode.m().is_zero() {
        return Vec::new();
    }
    let (content, _) = content_wrt(ode.m(), &[Symbol::x(), Symbol::y()]);
    content_factors(ode, &content, Provenance::MFactor)
}

fn content_factors(ode: &Ode2, content: &Polynomial, provenance: Provenance) -> Vec<DarbouxPair> {
    if content.is_free_of_main() {
        return Vec::new();
    }
    let candidates = factor_limited(content, 8)
        .factors
        .into_iter()
        .map(|f| f.poly)
        .filter(|f| !f.is_free_of_main())
        .collect();
    verified(ode, candidates, provenance)
}

/// H3: `N = K'(z) * b(x, y)`; tries `mu * K + T` for additive pieces `T`
/// of `b` and multipliers `mu` from the grid.
pub fn heuristic_den_z(ode: &Ode2, grid: &ScaleGrid) -> Vec<DarbouxPair> {
    let (x, y, z) = (Symbol::x(), Symbol::y(), Symbol::z());
    let n = ode.n();
    let (zc, _) = content_wrt(n, &[x.clone(), y.clone()]);
    if !zc.contains(&z) {
        return Vec::new();
    }
    let xy = n.exact_divide(&zc).expect("content divides").canonical();
    if xy.contains(&z) || (!xy.contains(&x) && !xy.contains(&y)) {
        return Vec::new();
    }
    let zpart = n.exact_divide(&xy).expect("factor divides");
    let k = zpart.integrate(&z);
    let pieces = additive_pieces(&xy);
    let mut candidates = Vec::new();
    for t in &pieces {
        for mu in grid.multipliers() {
            candidates.push(&(&mu * &k) + t);
        }
    }
    verified(ode, candidates, Provenance::DenZ)
}

/// H4: `M = (theta_x + z theta_y) * Z(z)`; tries `theta + mu * T` for
/// additive pieces `T` of `Z`.
pub fn heuristic_num_xy(ode: &Ode2, grid: &ScaleGrid) -> Vec<DarbouxPair> {
    let (x, y, z) = (Symbol::x(), Symbol::y(), Symbol::z());
    let m = ode.m();
    if m.is_zero() {
        return Vec::new();
    }
    let (zc, _) = content_wrt(m, &[x.clone(), y.clone()]);
    let mixed = m.exact_divide(&zc).expect("content divides").canonical();
    if (!mixed.contains(&x) && !mixed.contains(&y)) || mixed.degree_in(&z) > 1 {
        return Vec::new();
    }
    let coeffs = mixed.univariate_coeffs(&z);
    let u = coeffs[0].clone();
    let w = coeffs.get(1).cloned().unwrap_or_else(Polynomial::zero);
    if u.partial(&y) != w.partial(&x) {
        return Vec::new();
    }
    let ux = u.integrate(&x);
    let theta = &ux + &(&w - &ux.partial(&y)).integrate(&y);
    let zfull = m.exact_divide(&mixed).expect("factor divides");
    let mut candidates = vec![theta.clone()];
    for t in additive_pieces(&zfull) {
        for mu in grid.multipliers() {
            candidates.push(&theta + &(&mu * &t));
        }
    }
    verified(ode, candidates, Provenance::NumXy)
}

/// Sums over the nonempty subsets of the terms of `p`, in increasing
/// bitmask order. Empty when `p` has too many terms.
fn additive_pieces(p: &Polynomial) -> Vec<Polynomial> {
    let terms: Vec<Polynomial> = p
        .terms_desc()
        .map(|(m, c)| Polynomial::term(c.clone(), m.clone()))
        .collect();
    if terms.len() > MAX_SPLIT_TERMS {
        return Vec::new();
    }
    (1u32..(1 << terms.len()))
        .map(|mask| {
            terms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, t)| t.clone())
                .sum()
        })
        .collect()
}
