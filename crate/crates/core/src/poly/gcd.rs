//! Multivariate GCD by content/primitive-part recursion with a subresultant
//! remainder sequence in the highest-priority variable present.

use super::{PolyError, Polynomial, Symbol};

/// Greatest common divisor, normalized with [`Polynomial::canonical`].
pub fn gcd(p: &Polynomial, q: &Polynomial) -> Result<Polynomial, PolyError> {
    if p.is_zero() && q.is_zero() {
        return Err(PolyError::ZeroGcd);
    }
    Ok(gcd_nz(p, q))
}

/// GCD of a list, skipping zeros; the empty or all-zero list gives zero.
pub fn gcd_many<'a, I: IntoIterator<Item = &'a Polynomial>>(polys: I) -> Polynomial {
    let mut acc = Polynomial::zero();
    for p in polys {
        if p.is_zero() {
            continue;
        }
        acc = if acc.is_zero() { p.canonical() } else { gcd_nz(&acc, p) };
        if acc.is_constant() {
            return Polynomial::one();
        }
    }
    acc
}

pub(crate) fn gcd_nz(p: &Polynomial, q: &Polynomial) -> Polynomial {
    if p.is_zero() {
        return q.canonical();
    }
    if q.is_zero() {
        return p.canonical();
    }
    if p.is_constant() || q.is_constant() {
        return Polynomial::one();
    }
    if p.num_terms() == 1 && q.num_terms() == 1 {
        let (mp, _) = p.leading_term().unwrap();
        let (mq, _) = q.leading_term().unwrap();
        return Polynomial::var_monomial(mp.gcd(mq));
    }
    let v = p.symbols().union(&q.symbols()).next().cloned().unwrap();
    let (dp, dq) = (p.degree_in(&v), q.degree_in(&v));
    if dp == 0 {
        return gcd_nz(p, &content_in(q, &v));
    }
    if dq == 0 {
        return gcd_nz(&content_in(p, &v), q);
    }
    let cp = content_in(p, &v);
    let cq = content_in(q, &v);
    let pp = p.try_div(&cp).expect("content divides");
    let qp = q.try_div(&cq).expect("content divides");
    let c = gcd_nz(&cp, &cq);
    let g = subresultant_gcd(pp, qp, &v);
    (&c * &g).canonical()
}

/// GCD of the coefficients of `p` viewed as a polynomial in `v`.
fn content_in(p: &Polynomial, v: &Symbol) -> Polynomial {
    let coeffs = p.univariate_coeffs(v);
    // Fewer terms first keeps the recursion cheap.
    let mut nz: Vec<&Polynomial> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    nz.sort_by_key(|c| c.num_terms());
    gcd_many(nz)
}

fn primitive_in(p: &Polynomial, v: &Symbol) -> Polynomial {
    let c = content_in(p, v);
    p.try_div(&c).expect("content divides")
}

/// Pseudo-remainder of `a` by `b` in `v`.
fn prem(a: &Polynomial, b: &Polynomial, v: &Symbol) -> Polynomial {
    let db = b.degree_in(v);
    let da = a.degree_in(v);
    let lb = b.leading_coeff_in(v);
    let mut r = a.clone();
    let mut e = (da + 1).saturating_sub(db);
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.leading_coeff_in(v);
        let shift = super::Monomial::var_pow(v.clone(), dr - db);
        r = &(&lb * &r) - &(&lr * &b.mul_monomial(&shift));
        e = e.saturating_sub(1);
    }
    &r * &lb.pow(e)
}

fn subresultant_gcd(a: Polynomial, b: Polynomial, v: &Symbol) -> Polynomial {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) { (a, b) } else { (b, a) };
    if b.degree_in(v) == 0 {
        return Polynomial::one();
    }
    let mut g = Polynomial::one();
    let mut h = Polynomial::one();
    loop {
        let delta = a.degree_in(v) - b.degree_in(v);
        let r = prem(&a, &b, v);
        if r.is_zero() {
            return primitive_in(&b, v).canonical();
        }
        if r.degree_in(v) == 0 {
            return Polynomial::one();
        }
        let divisor = &g * &h.pow(delta);
        a = b;
        b = r.try_div(&divisor).expect("subresultant division is exact");
        g = a.leading_coeff_in(v);
        h = if delta == 0 {
            h
        } else {
            g.pow(delta)
                .try_div(&h.pow(delta - 1))
                .expect("subresultant division is exact")
        };
    }
}

/// Content and primitive part of `p` viewed as a polynomial in `vars`.
///
/// The content is free of `vars` and is the GCD of the coefficients; it is
/// canonical, and `content * primitive == p` exactly. For `p == 0` the result
/// is `(0, 1)`.
pub fn content_wrt(p: &Polynomial, vars: &[Symbol]) -> (Polynomial, Polynomial) {
    if p.is_zero() {
        return (Polynomial::zero(), Polynomial::one());
    }
    let coeffs = p.coefficients_in(|s| vars.contains(s));
    let mut nz: Vec<&Polynomial> = coeffs.values().collect();
    nz.sort_by_key(|c| c.num_terms());
    let content = gcd_many(nz);
    let primitive = p.try_div(&content).expect("content divides");
    (content, primitive)
}

impl Polynomial {
    pub(crate) fn var_monomial(m: super::Monomial) -> Polynomial {
        Polynomial::term(super::int(1), m)
    }
}
