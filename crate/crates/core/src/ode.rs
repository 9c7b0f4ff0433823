//! Rational second-order ODEs `y'' = M/N` with `z` standing for `y'`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{gcd, Coeff, Polynomial, RationalExpr, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OdeError {
    #[error("the denominator is identically zero")]
    ZeroDenominator,
}

/// `y'' = M/N` with `gcd(M, N) = 1`, the joint integer content of `M` and `N`
/// removed and the leading coefficient of `N` positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ode2 {
    m: Polynomial,
    n: Polynomial,
    normalization: Normalization,
}

/// What was removed from the input pair: `M0 = scale * cancelled * M` and
/// `N0 = scale * cancelled * N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalization {
    pub scale: Coeff,
    pub cancelled: Polynomial,
}

impl Ode2 {
    pub fn new(m: Polynomial, n: Polynomial) -> Result<Ode2, OdeError> {
        if n.is_zero() {
            return Err(OdeError::ZeroDenominator);
        }
        let g = gcd(&m, &n).expect("n is nonzero");
        let (m, n) = (m.exact_divide(&g).unwrap(), n.exact_divide(&g).unwrap());
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in m.terms().chain(n.terms()).map(|(_, c)| c) {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        let mut scale = Coeff::new(num, den);
        if n.leading_coefficient().is_negative() {
            scale = -scale;
        }
        let inv = scale.recip();
        Ok(Ode2 {
            m: m.scale(&inv),
            n: n.scale(&inv),
            normalization: Normalization { scale, cancelled: g },
        })
    }

    pub fn from_rational(phi: &RationalExpr) -> Ode2 {
        Ode2::new(phi.num().clone(), phi.den().clone()).expect("reduced denominators are nonzero")
    }

    pub fn m(&self) -> &Polynomial {
        &self.m
    }

    pub fn n(&self) -> &Polynomial {
        &self.n
    }

    pub fn normalization(&self) -> &Normalization {
        &self.normalization
    }

    pub fn phi(&self) -> RationalExpr {
        RationalExpr::new(self.m.clone(), self.n.clone()).unwrap()
    }

    /// `D = N d/dx + z N d/dy + M d/dz` applied to `p`.
    pub fn apply_d(&self, p: &Polynomial) -> Polynomial {
        let px = p.partial(&Symbol::x());
        let py = p.partial(&Symbol::y());
        let pz = p.partial(&Symbol::z());
        let xy = &px + &(&py * &Polynomial::var(Symbol::z()));
        &(&self.n * &xy) + &(&self.m * &pz)
    }

    /// Symbols other than `x`, `y`, `z` occurring in the equation.
    pub fn parameters(&self) -> Vec<Symbol> {
        let mut s = self.m.parameters();
        s.extend(self.n.parameters());
        s.into_iter().collect()
    }

    /// Total degree in `x`, `y`, `z` of the larger of `M` and `N`.
    pub fn degree(&self) -> u32 {
        self.m.main_degree().max(self.n.main_degree())
    }
}

impl std::fmt::Display for Ode2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.phi())
    }
}
