//! Sparse multivariate polynomials over the rationals.
//!
//! Every identifier is a variable of the same polynomial ring; `x`, `y` and
//! `z` are the main variables and everything else is a parameter. Terms are
//! kept in a `BTreeMap` keyed by [`Monomial`] in lexicographic order
//! (`x > y > z > parameters`), so iteration in reverse yields the leading
//! term first.

mod factor;
mod gcd;
mod monomial;
mod rational;
mod symbol;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use factor::{factor_limited, Factor, Factorization};
pub use gcd::{content_wrt, gcd, gcd_many};
pub use monomial::Monomial;
pub use rational::RationalExpr;
pub use symbol::{Symbol, SymbolKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("cannot differentiate with respect to parameter `{0}`")]
    ParameterDerivative(Symbol),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial is not divisible")]
    NotDivisible,
    #[error("gcd(0, 0) is undefined")]
    ZeroGcd,
    #[error("`{0}` is not a main variable")]
    NotMainVariable(Symbol),
}

pub type Coeff = BigRational;

pub fn rat(n: i64, d: i64) -> Coeff {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { terms }
    }

    pub fn from_int(n: i64) -> Polynomial {
        Polynomial::constant(int(n))
    }

    pub fn var(s: Symbol) -> Polynomial {
        Polynomial::term(Coeff::one(), Monomial::var(s))
    }

    pub fn named(name: &str) -> Polynomial {
        Polynomial::var(Symbol::new(name))
    }

    pub fn term(c: Coeff, m: Monomial) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Coeff)>>(it: I) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_one() && c.is_one())
                .unwrap_or(false)
    }

    /// True for the zero polynomial and nonzero rational constants.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<Coeff> {
        if self.is_zero() {
            Some(Coeff::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    /// True when no main variable occurs (parameters may).
    pub fn is_free_of_main(&self) -> bool {
        self.terms.keys().all(|m| !m.has_main())
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.terms.keys().any(|m| m.degree_in(s) > 0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    /// Terms from the leading one down.
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Coeff {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Coeff::zero)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms
            .keys()
            .flat_map(|m| m.symbols().cloned())
            .collect()
    }

    pub fn parameters(&self) -> BTreeSet<Symbol> {
        self.symbols().into_iter().filter(Symbol::is_parameter).collect()
    }

    /// Total degree in every symbol; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Total degree in `x`, `y`, `z`; zero polynomial reports 0.
    pub fn main_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::main_degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, s: &Symbol) -> u32 {
        self.terms.keys().map(|m| m.degree_in(s)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Coeff) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Partial derivative with respect to any symbol, parameters included.
    pub fn partial(&self, s: &Symbol) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if let Some((e, lowered)) = m.lower(s) {
                out.add_term(lowered, c * int(e as i64));
            }
        }
        out
    }

    /// Partial derivative by a main variable. Parameters are constants here,
    /// so asking for the derivative by a parameter is an error.
    pub fn differentiate(&self, s: &Symbol) -> Result<Polynomial, PolyError> {
        if !s.is_main() {
            return Err(PolyError::ParameterDerivative(s.clone()));
        }
        Ok(self.partial(s))
    }

    /// Antiderivative in `s` with zero integration constant.
    pub fn integrate(&self, s: &Symbol) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.degree_in(s);
            out.add_term(m.mul(&Monomial::var(s.clone())), c / int(e as i64 + 1));
        }
        out
    }

    /// Exact quotient `self / v`.
    pub fn exact_divide(&self, v: &Polynomial) -> Result<Polynomial, PolyError> {
        if v.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        self.try_div(v).ok_or(PolyError::NotDivisible)
    }

    /// Multivariate division by a single divisor; succeeds exactly when `v`
    /// divides `self`. Panics on a zero divisor.
    pub(crate) fn try_div(&self, v: &Polynomial) -> Option<Polynomial> {
        let (lm, lc) = v.leading_term().expect("division by zero polynomial");
        if let Some(c) = v.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut r = self.clone();
        let mut q = Polynomial::zero();
        while let Some((rm, rc)) = r.leading_term() {
            let qm = rm.div(&lm)?;
            let qc = rc / &lc;
            for (m, c) in &v.terms {
                r.add_term(m.mul(&qm), -(c * &qc));
            }
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Coefficients of `self` viewed as a polynomial in `vars`: a map from a
    /// monomial in `vars` to its coefficient (free of `vars`).
    pub fn coefficients_in(&self, in_set: impl Fn(&Symbol) -> bool) -> BTreeMap<Monomial, Polynomial> {
        let mut out: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inside, rest) = m.partition(&in_set);
            out.entry(inside).or_default().add_term(rest, c.clone());
        }
        out
    }

    /// Univariate view in `s`: entry `k` is the coefficient of `s^k`.
    pub fn univariate_coeffs(&self, s: &Symbol) -> Vec<Polynomial> {
        let d = self.degree_in(s) as usize;
        let mut out = vec![Polynomial::zero(); d + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(s);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn leading_coeff_in(&self, s: &Symbol) -> Polynomial {
        let d = self.degree_in(s);
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(s);
            if e == d {
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Positive rational `c` with `self / c` having coprime integer coefficients.
    pub fn rational_content(&self) -> Coeff {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Coeff::one();
        }
        BigRational::new(num, den)
    }

    /// Integer-primitive with positive leading coefficient. Zero stays zero.
    pub fn canonical(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut c = self.rational_content();
        if self.leading_coefficient().is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// The factor `c` with `self == c * self.canonical()`.
    pub fn canonical_unit(&self) -> Coeff {
        if self.is_zero() {
            return Coeff::one();
        }
        let c = self.rational_content();
        if self.leading_coefficient().is_negative() {
            -c
        } else {
            c
        }
    }

    /// Removes the factor free of `x`, `y`, `z` and normalizes what is left.
    /// This is the normal form used for Darboux polynomials, where such
    /// factors behave like constants.
    pub fn main_primitive(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let (_, prim) = content_wrt(self, &Symbol::main_variables());
        prim.canonical()
    }

    pub fn map_coefficients(&self, f: impl Fn(&Coeff) -> Coeff) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Substitutes polynomials for symbols.
    pub fn substitute(&self, subst: &BTreeMap<Symbol, Polynomial>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(c.clone());
            let mut kept = Vec::new();
            for (s, e) in m.pairs() {
                match subst.get(s) {
                    Some(p) => t = &t * &p.pow(*e),
                    None => kept.push((s.clone(), *e)),
                }
            }
            out = &out + &t.mul_monomial(&Monomial::from_pairs(kept));
        }
        out
    }

    /// Evaluates every symbol from `values` modulo the prime `p`. Returns `None`
    /// when a coefficient denominator vanishes mod `p`.
    pub fn eval_mod(&self, p: u64, values: &dyn Fn(&Symbol) -> u64) -> Option<u64> {
        let mut acc: u64 = 0;
        let pb = BigInt::from(p);
        for (m, c) in &self.terms {
            let n = mod_bigint(c.numer(), &pb);
            let d = mod_bigint(c.denom(), &pb);
            if d == 0 {
                return None;
            }
            let mut t = mulmod(n, inv_mod(d, p), p);
            for (s, e) in m.pairs() {
                t = mulmod(t, powmod(values(s), *e as u64, p), p);
            }
            acc = (acc + t) % p;
        }
        Some(acc)
    }
}

pub(crate) fn mod_bigint(n: &BigInt, p: &BigInt) -> u64 {
    let r = n.mod_floor(p);
    let (_, digits) = r.to_u64_digits();
    digits.first().copied().unwrap_or(0)
}

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    if p <= 1 << 32 {
        return a * b % p;
    }
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        let (big, small) = if self.terms.len() >= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial { (&self).$f(&rhs) }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: &'a Polynomial) -> Polynomial { (&self).$f(rhs) }
        }
        impl<'a> $tr<Polynomial> for &'a Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial { self.$f(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl std::iter::Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(iter: I) -> Polynomial {
        iter.fold(Polynomial::zero(), |a, b| &a + &b)
    }
}

impl std::iter::Product for Polynomial {
    fn product<I: Iterator<Item = Polynomial>>(iter: I) -> Polynomial {
        iter.fold(Polynomial::one(), |a, b| &a * &b)
    }
}

pub(crate) fn fmt_coeff(c: &Coeff) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl Polynomial {
    /// Compact rendering without spaces around the binary operators.
    pub fn to_compact_string(&self) -> String {
        self.render(false)
    }

    fn render(&self, spaced: bool) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms_desc().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else if spaced {
                s.push_str(if neg { " - " } else { " + " });
            } else {
                s.push(if neg { '-' } else { '+' });
            }
            if m.is_one() {
                s.push_str(&fmt_coeff(&a));
            } else if a.is_one() {
                s.push_str(&m.to_string());
            } else {
                s.push_str(&fmt_coeff(&a));
                s.push('*');
                s.push_str(&m.to_string());
            }
        }
        s
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(true))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
