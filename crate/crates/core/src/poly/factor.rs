//! Partial factorization: content splits, square-free decomposition and
//! rational roots of univariate pieces. Factors that are not provably
//! irreducible are flagged instead of being split further.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::gcd::gcd_nz;
use super::{content_wrt, Coeff, Monomial, Polynomial, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub poly: Polynomial,
    pub multiplicity: u32,
    /// False when no splitting rule applied and irreducibility is unknown.
    pub irreducible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Coeff,
    pub factors: Vec<Factor>,
}

impl Factorization {
    pub fn expand(&self) -> Polynomial {
        self.factors
            .iter()
            .map(|f| f.poly.pow(f.multiplicity))
            .product::<Polynomial>()
            .scale(&self.unit)
    }
}

/// Splits `p` as `unit * prod f_i^k_i` with canonical, pairwise distinct
/// factors sorted in ascending order.
///
/// `max_deg` bounds the univariate degree for which rational roots are
/// searched.
pub fn factor_limited(p: &Polynomial, max_deg: u32) -> Factorization {
    assert!(!p.is_zero(), "factor_limited of zero");
    let unit = p.canonical_unit();
    let mut out: Vec<Factor> = Vec::new();
    split(&p.canonical(), 1, max_deg, &mut out);

    out.sort_by(|a, b| a.poly.cmp_terms(&b.poly));
    let mut merged: Vec<Factor> = Vec::new();
    for f in out {
        match merged.last_mut() {
            Some(last) if last.poly == f.poly => {
                last.multiplicity += f.multiplicity;
                last.irreducible &= f.irreducible;
            }
            _ => merged.push(f),
        }
    }
    let rebuilt = Factorization { unit: Coeff::one(), factors: merged.clone() }.expand();
    // Each piece was canonicalized, so the remaining scalar is exact.
    let fix = p.canonical().leading_coefficient() / rebuilt.leading_coefficient();
    Factorization { unit: unit * fix, factors: merged }
}

fn split(p: &Polynomial, mult: u32, max_deg: u32, out: &mut Vec<Factor>) {
    if p.is_constant() {
        return;
    }
    // Monomial factor first.
    let mut mono = p.leading_term().unwrap().0.clone();
    for (m, _) in p.terms() {
        mono = mono.gcd(m);
    }
    if !mono.is_one() {
        for (s, e) in mono.pairs() {
            out.push(Factor {
                poly: Polynomial::var(s.clone()),
                multiplicity: mult * e,
                irreducible: true,
            });
        }
        let rest = p.try_div(&Polynomial::var_monomial(mono.clone())).unwrap();
        split(&rest.canonical(), mult, max_deg, out);
        return;
    }
    let syms: Vec<Symbol> = p.symbols().into_iter().collect();
    // Content split over each single variable.
    for s in &syms {
        let (c, prim) = content_wrt(p, std::slice::from_ref(s));
        if !c.is_constant() && !prim.is_constant() {
            split(&c.canonical(), mult, max_deg, out);
            split(&prim.canonical(), mult, max_deg, out);
            return;
        }
    }
    // Now p is primitive with respect to each of its variables.
    let v = syms[0].clone();
    for (f, k) in square_free(p, &v) {
        if f.is_constant() {
            continue;
        }
        if k == 1 && f == *p {
            finish(&f, mult, max_deg, out);
        } else {
            split(&f, mult * k, max_deg, out);
        }
    }
}

fn finish(p: &Polynomial, mult: u32, max_deg: u32, out: &mut Vec<Factor>) {
    let syms: Vec<Symbol> = p.symbols().into_iter().collect();
    if syms.len() == 1 && p.degree_in(&syms[0]) <= max_deg {
        let s = &syms[0];
        if let Some(root) = rational_root(p, s) {
            let lin = Polynomial::from_terms([
                (Monomial::var(s.clone()), root.denom().clone().into()),
                (Monomial::one(), Coeff::from(-root.numer().clone())),
            ])
            .canonical();
            let rest = p.try_div(&lin).expect("root gives a factor").canonical();
            out.push(Factor { poly: lin, multiplicity: mult, irreducible: true });
            finish(&rest, mult, max_deg, out);
            return;
        }
        // No rational root: degree at most 3 means irreducible over Q.
        let d = p.degree_in(s);
        out.push(Factor { poly: p.clone(), multiplicity: mult, irreducible: d <= 3 });
        return;
    }
    if p.is_constant() {
        return;
    }
    let irreducible = is_certainly_irreducible(p);
    out.push(Factor { poly: p.clone(), multiplicity: mult, irreducible });
}

/// A polynomial that is linear in some variable and primitive with respect to
/// it cannot split.
fn is_certainly_irreducible(p: &Polynomial) -> bool {
    if p.total_degree() == Some(1) {
        return true;
    }
    p.symbols().into_iter().any(|s| {
        p.degree_in(&s) == 1 && {
            let c = p.univariate_coeffs(&s);
            gcd_nz(&c[0], &c[1]).is_constant()
        }
    })
}

/// Yun's algorithm in `v` for `p` primitive in `v`. Returns `(factor, k)`.
fn square_free(p: &Polynomial, v: &Symbol) -> Vec<(Polynomial, u32)> {
    let dp = p.partial(v);
    if dp.is_zero() {
        return vec![(p.clone(), 1)];
    }
    let a0 = gcd_nz(p, &dp);
    let mut b = p.try_div(&a0).expect("gcd divides");
    let mut c = dp.try_div(&a0).expect("gcd divides");
    let mut d = &c - &b.partial(v);
    let mut out = Vec::new();
    let mut k = 1;
    while !b.is_constant() {
        let a = gcd_nz(&b, &d);
        if !a.is_constant() {
            out.push((a.canonical(), k));
        }
        b = b.try_div(&a).expect("gcd divides");
        c = d.try_div(&a).expect("gcd divides");
        d = &c - &b.partial(v);
        k += 1;
    }
    out
}

/// A rational root of the univariate polynomial `p` in `s`, if one exists
/// among the candidates allowed by the rational root theorem. Coefficients too
/// large to enumerate divisors of are skipped.
fn rational_root(p: &Polynomial, s: &Symbol) -> Option<Coeff> {
    let scale = p.rational_content().recip();
    let coeffs: Vec<BigInt> = p
        .univariate_coeffs(s)
        .iter()
        .map(|c| (c.constant_value().unwrap() * &scale).to_integer())
        .collect();
    let lead = coeffs.last()?.abs();
    let tail = coeffs.iter().find(|c| !c.is_zero())?.abs();
    let nums = divisors(&tail)?;
    let dens = divisors(&lead)?;
    for d in &dens {
        for n in &nums {
            for sign in [1i64, -1] {
                let r = Coeff::new(n * BigInt::from(sign), d.clone());
                if eval_univariate(&coeffs, &r).is_zero() {
                    return Some(r);
                }
            }
        }
    }
    None
}

fn eval_univariate(coeffs: &[BigInt], r: &Coeff) -> Coeff {
    let mut acc = Coeff::zero();
    for c in coeffs.iter().rev() {
        acc = acc * r + Coeff::from(c.clone());
    }
    acc
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            out.push(BigInt::from(i));
            if i * i != n {
                out.push(BigInt::from(n / i));
            }
        }
        i += 1;
    }
    out.sort();
    Some(out)
}

impl Polynomial {
    /// Total order on polynomials: compares terms from the leading one down,
    /// monomials first then coefficients; a proper prefix sorts first.
    pub fn cmp_terms(&self, other: &Polynomial) -> std::cmp::Ordering {
        let mut a = self.terms_desc();
        let mut b = other.terms_desc();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return std::cmp::Ordering::Equal,
                (None, Some(_)) => return std::cmp::Ordering::Less,
                (Some(_), None) => return std::cmp::Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => {
                    let o = ma.cmp(mb).then_with(|| ca.cmp(cb));
                    if o != std::cmp::Ordering::Equal {
                        return o;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::test_util::poly;

    #[test]
    fn square_free_and_content_split() {
        let k = poly(&[(2, &[("z", 1)]), (3, &[])]);
        let c = poly(&[(1, &[("x", 1)]), (-1, &[("y", 3)]), (-1, &[("y", 1)])]);
        let p = &k * &c.pow(2);
        let f = factor_limited(&p, 8);
        assert_eq!(f.expand(), p);
        let got: Vec<(Polynomial, u32)> = f.factors.iter().map(|f| (f.poly.clone(), f.multiplicity)).collect();
        assert_eq!(got, vec![(k, 1), (c, 2)]);
        assert!(f.factors.iter().all(|f| f.irreducible));
    }

    #[test]
    fn pure_power() {
        let p = poly(&[(1, &[("z", 5)])]);
        let f = factor_limited(&p, 8);
        assert_eq!(f.factors.len(), 1);
        assert_eq!(f.factors[0].poly, Polynomial::named("z"));
        assert_eq!(f.factors[0].multiplicity, 5);
    }

    #[test]
    fn unsplittable_is_flagged() {
        let p = poly(&[(1, &[("x", 2)]), (1, &[("y", 2)]), (1, &[])]);
        let f = factor_limited(&p, 8);
        assert_eq!(f.factors.len(), 1);
        assert_eq!(f.factors[0].poly, p);
        assert!(!f.factors[0].irreducible);
    }

    #[test]
    fn univariate_rational_roots() {
        // 6 z^3 - 7 z^2 + 1 = (z - 1)(2 z - 1)(3 z + 1)
        let p = poly(&[(6, &[("z", 3)]), (-7, &[("z", 2)]), (1, &[])]);
        let f = factor_limited(&p, 8);
        assert_eq!(f.expand(), p);
        assert_eq!(f.factors.len(), 3);
        assert!(f.factors.iter().all(|f| f.irreducible && f.poly.total_degree() == Some(1)));
    }

    #[test]
    fn negative_unit_is_kept() {
        let p = poly(&[(-5, &[("z", 4), ("a", 1), ("d", 1), ("y", 6)]), (-5, &[("z", 4), ("b", 1), ("c", 1), ("x", 1)])]);
        let f = factor_limited(&p, 8);
        assert_eq!(f.expand(), p);
        assert_eq!(f.unit, crate::poly::int(-5));
    }
}
