use crate::ode::{Ode2, OdeError};
use crate::poly::{Polynomial, RationalExpr, Symbol};

/// Components of the first integral `A/Dp + ln(B/C)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantComponents {
    pub a: Polynomial,
    pub dp: Polynomial,
    pub b: Polynomial,
    pub c: Polynomial,
}

/// The equation `y'' = phi` having `A/Dp + ln(B/C)` as a first integral,
/// `phi = -(I_x + z I_y) / I_z`.
pub fn generate_ode(inv: &InvariantComponents) -> Result<Ode2, OdeError> {
    if inv.dp.is_zero() || inv.b.is_zero() || inv.c.is_zero() {
        return Err(OdeError::ZeroDenominator);
    }
    let rational = RationalExpr::new(inv.a.clone(), inv.dp.clone()).unwrap();
    let grad = |s: &Symbol| -> RationalExpr {
        let log_b = RationalExpr::new(inv.b.partial(s), inv.b.clone()).unwrap();
        let log_c = RationalExpr::new(inv.c.partial(s), inv.c.clone()).unwrap();
        rational.differentiate(s).unwrap().add(&log_b).sub(&log_c)
    };
    let iz = grad(&Symbol::z());
    if iz.is_zero() {
        return Err(OdeError::ZeroDenominator);
    }
    let z = RationalExpr::from_poly(Polynomial::var(Symbol::z()));
    let num = grad(&Symbol::x()).add(&z.mul(&grad(&Symbol::y())));
    let phi = num.neg().div(&iz).expect("nonzero I_z");
    Ok(Ode2::from_rational(&phi))
}
