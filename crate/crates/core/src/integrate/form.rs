use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::darboux::InvariantComponents;
use crate::ode::Ode2;
use crate::poly::{factor_limited, Coeff, Polynomial, RationalExpr, Symbol};

/// A first integral `A/D + sum e_k ln(u_k)`.
///
/// Log arguments are canonical, pairwise distinct and depend on `x`, `y` or
/// `z`; coefficients are nonzero. Additive constants are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantForm {
    rational: RationalExpr,
    logs: Vec<(Coeff, Polynomial)>,
}

/// `I = A/D + (1/L) ln(B/C)` with `B` and `C` kept as power products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abcd {
    pub a: Polynomial,
    pub d: Polynomial,
    pub l: BigInt,
    pub b: Vec<(Polynomial, u32)>,
    pub c: Vec<(Polynomial, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    /// Numerator of `N I_x + z N I_y + M I_z` over a common denominator.
    Residual(Polynomial),
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }
}

impl InvariantForm {
    pub fn new(rational: RationalExpr, logs: Vec<(Coeff, Polynomial)>) -> InvariantForm {
        let mut merged: Vec<(Coeff, Polynomial)> = Vec::new();
        for (c, u) in logs {
            if c.is_zero() || u.is_free_of_main() {
                continue;
            }
            for f in factor_limited(&u, 8).factors {
                if f.poly.is_free_of_main() {
                    continue;
                }
                let k = &c * Coeff::from(BigInt::from(f.multiplicity));
                let v = f.poly.main_primitive();
                match merged.iter_mut().find(|(_, w)| *w == v) {
                    Some((e, _)) => *e += k,
                    None => merged.push((k, v)),
                }
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        merged.sort_by(|a, b| a.1.cmp_terms(&b.1));
        InvariantForm { rational: drop_constant(rational), logs: merged }
    }

    pub fn from_components(c: &InvariantComponents) -> InvariantForm {
        let r = RationalExpr::new(c.a.clone(), c.dp.clone()).expect("components have nonzero Dp");
        InvariantForm::new(r, vec![(Coeff::one(), c.b.clone()), (-Coeff::one(), c.c.clone())])
    }

    pub fn rational_part(&self) -> &RationalExpr {
        &self.rational
    }

    pub fn log_terms(&self) -> &[(Coeff, Polynomial)] {
        &self.logs
    }

    pub fn is_trivial(&self) -> bool {
        self.rational.is_zero() && self.logs.is_empty()
    }

    pub fn scale(&self, c: &Coeff) -> InvariantForm {
        InvariantForm::new(
            self.rational.scale(c),
            self.logs.iter().map(|(e, u)| (e * c, u.clone())).collect(),
        )
    }

    /// Partial derivative by a main variable.
    pub fn differentiate(&self, s: &Symbol) -> RationalExpr {
        let mut acc = self.rational.differentiate(s).expect("main variable");
        for (c, u) in &self.logs {
            let du = u.differentiate(s).expect("main variable");
            if !du.is_zero() {
                acc = acc.add(&RationalExpr::new(du.scale(c), u.clone()).unwrap());
            }
        }
        acc
    }

    /// Checks `N I_x + z N I_y + M I_z = 0` exactly.
    pub fn verify(&self, ode: &Ode2) -> Verdict {
        let z = RationalExpr::from_poly(Polynomial::var(Symbol::z()));
        let n = RationalExpr::from_poly(ode.n().clone());
        let m = RationalExpr::from_poly(ode.m().clone());
        let ix = self.differentiate(&Symbol::x());
        let iy = self.differentiate(&Symbol::y());
        let iz = self.differentiate(&Symbol::z());
        let total = n.mul(&ix.add(&z.mul(&iy))).add(&m.mul(&iz));
        if total.is_zero() {
            Verdict::Verified
        } else {
            Verdict::Residual(total.num().clone())
        }
    }

    /// Splits the log coefficients by sign and clears their denominators.
    pub fn to_abcd(&self) -> Abcd {
        let l = self
            .logs
            .iter()
            .fold(BigInt::one(), |acc, (c, _)| acc.lcm(c.denom()));
        let mut b = Vec::new();
        let mut c = Vec::new();
        for (e, u) in &self.logs {
            let k = (e * Coeff::from(l.clone())).to_integer();
            let k: u32 = u32::try_from(k.abs()).expect("log exponent fits");
            if e.is_positive() {
                b.push((u.clone(), k));
            } else {
                c.push((u.clone(), k));
            }
        }
        Abcd { a: self.rational.num().clone(), d: self.rational.den().clone(), l, b, c }
    }
}

impl Abcd {
    pub fn to_form(&self) -> InvariantForm {
        let r = RationalExpr::new(self.a.clone(), self.d.clone()).expect("nonzero denominator");
        let inv_l = Coeff::new(BigInt::one(), self.l.clone());
        let mut logs = Vec::new();
        for (u, k) in &self.b {
            logs.push((&inv_l * Coeff::from(BigInt::from(*k)), u.clone()));
        }
        for (u, k) in &self.c {
            logs.push((-&inv_l * Coeff::from(BigInt::from(*k)), u.clone()));
        }
        InvariantForm::new(r, logs)
    }
}

/// Removes the part of `A/D` that does not depend on `x`, `y`, `z`.
fn drop_constant(r: RationalExpr) -> RationalExpr {
    let (a, d) = r.into_parts();
    let dcoef = d.coefficients_in(Symbol::is_main);
    let acoef = a.coefficients_in(Symbol::is_main);
    let (mu, dc) = dcoef.iter().next_back().expect("nonzero denominator");
    let Some(ac) = acoef.get(mu) else {
        return RationalExpr::new(a, d).unwrap();
    };
    let Some(dc) = dc.constant_value() else {
        return RationalExpr::new(a, d).unwrap();
    };
    let k = ac.scale(&dc.recip());
    RationalExpr::new(&a - &(&k * &d), d).unwrap()
}
