use std::fmt;

use num_traits::Zero;

use super::gcd::gcd_nz;
use super::{PolyError, Polynomial, Symbol};

/// A reduced quotient of polynomials. The denominator is canonical (integer
/// primitive, positive leading coefficient) and shares no non-constant factor
/// with the numerator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalExpr {
    num: Polynomial,
    den: Polynomial,
}

impl RationalExpr {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<RationalExpr, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RationalExpr::zero());
        }
        let g = gcd_nz(&num, &den);
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (num.try_div(&g).unwrap(), den.try_div(&g).unwrap())
        };
        let u = den.canonical_unit();
        if !(u == super::int(1)) {
            let inv = u.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RationalExpr { num, den })
    }

    pub fn from_poly(p: Polynomial) -> RationalExpr {
        RationalExpr { num: p, den: Polynomial::one() }
    }

    pub fn zero() -> RationalExpr {
        RationalExpr::from_poly(Polynomial::zero())
    }

    pub fn one() -> RationalExpr {
        RationalExpr::from_poly(Polynomial::one())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn into_parts(self) -> (Polynomial, Polynomial) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn add(&self, other: &RationalExpr) -> RationalExpr {
        if self.den == other.den {
            return RationalExpr::new(&self.num + &other.num, self.den.clone()).unwrap();
        }
        let g = gcd_nz(&self.den, &other.den);
        let a = other.den.try_div(&g).unwrap();
        let b = self.den.try_div(&g).unwrap();
        let num = &(&self.num * &a) + &(&other.num * &b);
        RationalExpr::new(num, &self.den * &a).unwrap()
    }

    pub fn sub(&self, other: &RationalExpr) -> RationalExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalExpr {
        RationalExpr { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, other: &RationalExpr) -> RationalExpr {
        RationalExpr::new(&self.num * &other.num, &self.den * &other.den).unwrap()
    }

    pub fn div(&self, other: &RationalExpr) -> Result<RationalExpr, PolyError> {
        if other.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        RationalExpr::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn pow(&self, e: i32) -> Result<RationalExpr, PolyError> {
        if e >= 0 {
            Ok(RationalExpr { num: self.num.pow(e as u32), den: self.den.pow(e as u32) })
        } else {
            RationalExpr::new(self.den.pow((-e) as u32), self.num.pow((-e) as u32))
        }
    }

    pub fn scale(&self, c: &super::Coeff) -> RationalExpr {
        if c.is_zero() {
            return RationalExpr::zero();
        }
        RationalExpr { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Quotient rule derivative; parameters are constants.
    pub fn differentiate(&self, s: &Symbol) -> Result<RationalExpr, PolyError> {
        let dn = self.num.differentiate(s)?;
        let dd = self.den.differentiate(s)?;
        if dd.is_zero() {
            return RationalExpr::new(dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        RationalExpr::new(num, self.den.pow(2))
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Polynomial| {
            if p.num_terms() > 1 || p.leading_coefficient() < super::int(0) {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Debug for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
