//! First integrals `A/Dp + sum e_i ln v_i` from a solution of the
//! compatibility equations.
//!
//! The gradient of the integral is `(R (M Q + z P), -R P, -R N Q)` up to a
//! constant factor. With `Dp = prod v_i^t_i` fixed, matching it is a linear
//! system in the coefficients of `A`, the `e_i` and the scale.

mod form;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg::{nullspace, only_trivial, Row};
use crate::ode::Ode2;
use crate::poly::{Coeff, Monomial, Polynomial, RationalExpr, Symbol};
use crate::ps_solver::{integrating_factor, PowerProduct, PsSolution};

pub use form::{Abcd, InvariantForm, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegrateError {
    #[error("no invariant A/Dp + sum e_i ln v_i with {0}")]
    NoMatch(String),
    #[error("the integrating factor has non-integer exponents")]
    NonRationalFactor,
}

/// `R (M Q + z P) dx - R P dy - R N Q dz` with `R` kept factored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneForm {
    pub r: PowerProduct,
    pub px: Polynomial,
    pub py: Polynomial,
    pub pz: Polynomial,
}

impl OneForm {
    /// The three components as reduced rational functions, when `R` is
    /// rational.
    pub fn components(&self) -> Option<[RationalExpr; 3]> {
        let r = self.r.to_rational()?;
        let f = |p: &Polynomial| r.mul(&RationalExpr::from_poly(p.clone()));
        Some([f(&self.px), f(&self.py), f(&self.pz)])
    }
}

pub fn exact_one_form(ode: &Ode2, sol: &PsSolution) -> OneForm {
    let z = Polynomial::var(Symbol::z());
    OneForm {
        r: integrating_factor(sol),
        px: &(ode.m() * &sol.q) + &(&z * &sol.p),
        py: -&sol.p,
        pz: -&(ode.n() * &sol.q),
    }
}

#[derive(Clone, Debug, Default)]
pub struct AssembleBounds {
    /// Degree bound for `A`; `deg Dp + max(deg M, deg N)` when unset.
    pub a_deg: Option<u32>,
}

/// The first invariant in the order `(sum t_i, deg A)` whose gradient is a
/// constant multiple of the one-form.
pub fn assemble_invariant(
    ode: &Ode2,
    sol: &PsSolution,
    form: &OneForm,
    bounds: &AssembleBounds,
) -> Result<InvariantForm, IntegrateError> {
    let mut exps: Vec<i64> = Vec::new();
    for m in &sol.exponents {
        if !m.is_integer() {
            return Err(IntegrateError::NonRationalFactor);
        }
        exps.push(i64::try_from(m.to_integer()).map_err(|_| IntegrateError::NonRationalFactor)?);
    }
    let vs: Vec<&Polynomial> = sol.pairs.iter().map(|p| p.v()).collect();
    let mut tried = Vec::new();
    for t in denominator_exponents(&exps) {
        let dp: Polynomial = vs.iter().zip(&t).map(|(v, &k)| v.pow(k)).product();
        let max_a = bounds.a_deg.unwrap_or(dp.main_degree() + ode.degree());
        let sys = System::new(&vs, &exps, &t, &dp, form);
        for a_deg in 0..=max_a {
            if let Some(inv) = sys.solve(a_deg) {
                return Ok(inv);
            }
        }
        tried.push(format!("t={t:?} deg A<={max_a}"));
    }
    Err(IntegrateError::NoMatch(tried.join(", ")))
}

pub fn verify_invariant(ode: &Ode2, inv: &InvariantForm) -> Verdict {
    inv.verify(ode)
}

/// True when the gradient of `inv` is a nonzero constant multiple of the
/// one-form.
pub fn matches_one_form(inv: &InvariantForm, form: &OneForm) -> bool {
    let Some(w) = form.components() else { return false };
    let grad = [Symbol::x(), Symbol::y(), Symbol::z()].map(|s| inv.differentiate(&s));
    let Some(k) = (0..3).find(|&i| !w[i].is_zero()) else { return false };
    let Ok(kappa) = grad[k].div(&w[k]) else { return false };
    kappa.is_polynomial() && kappa.num().is_free_of_main() && !kappa.is_zero()
        && (0..3).all(|i| grad[i] == w[i].mul(&kappa))
}

/// `t` with `0 <= t_i <= max(0, -m_i)`, by increasing sum then
/// lexicographically.
fn denominator_exponents(m: &[i64]) -> Vec<Vec<u32>> {
    let caps: Vec<u32> = m.iter().map(|&e| (-e).max(0) as u32).collect();
    let mut all = vec![Vec::new()];
    for &c in &caps {
        all = all
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                (0..=c).map(move |k| {
                    let mut p = prefix.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    all.sort_by_key(|t| (t.iter().sum::<u32>(), t.clone()));
    all
}

/// The identity `L dI/ds = scale * L R w_s` for `s = x, y, z`, multiplied
/// through by `L = prod v_i^l_i`, as columns over the unknowns.
struct System<'a> {
    dp: &'a Polynomial,
    /// `L / Dp^2`.
    over_dp2: Polynomial,
    /// Log columns then the scale column, one polynomial per direction.
    fixed: Vec<[Polynomial; 3]>,
    vs: Vec<Polynomial>,
}

impl<'a> System<'a> {
    fn new(vs: &[&Polynomial], m: &[i64], t: &[u32], dp: &'a Polynomial, form: &OneForm) -> System<'a> {
        let dirs = [Symbol::x(), Symbol::y(), Symbol::z()];
        let l: Vec<u32> = m
            .iter()
            .zip(t)
            .map(|(&mi, &ti)| (2 * ti).max(1).max((-mi).max(0) as u32))
            .collect();
        let prod = |e: &dyn Fn(usize) -> u32| -> Polynomial {
            vs.iter().enumerate().map(|(i, v)| v.pow(e(i))).product()
        };
        let over_dp2 = prod(&|i| l[i] - 2 * t[i]);
        let mut fixed = Vec::new();
        for (i, v) in vs.iter().enumerate() {
            let rest = prod(&|j| if j == i { l[j] - 1 } else { l[j] });
            fixed.push(dirs.clone().map(|s| &v.partial(&s) * &rest));
        }
        let r_l = prod(&|i| (l[i] as i64 + m[i]) as u32);
        let w = [&form.px, &form.py, &form.pz];
        fixed.push([0, 1, 2].map(|k| -&(w[k] * &r_l)));
        System { dp, over_dp2, fixed, vs: vs.iter().map(|v| (*v).clone()).collect() }
    }

    fn solve(&self, a_deg: u32) -> Option<InvariantForm> {
        let dirs = [Symbol::x(), Symbol::y(), Symbol::z()];
        let skip = if self.dp.is_constant() {
            Monomial::one()
        } else {
            self.dp.coefficients_in(Symbol::is_main).into_keys().next_back().unwrap()
        };
        let a_basis: Vec<Monomial> = main_monomials(a_deg).into_iter().filter(|m| *m != skip).collect();
        let ncols = a_basis.len() + self.fixed.len();
        let mut rows: BTreeMap<(usize, Monomial), Row> = BTreeMap::new();
        let mut put = |col: usize, k: usize, p: &Polynomial| {
            for (mono, c) in p.coefficients_in(Symbol::is_main) {
                rows.entry((k, mono)).or_default().insert(col, c);
            }
        };
        for (j, mu) in a_basis.iter().enumerate() {
            let alpha = Polynomial::term(Coeff::from_integer(1.into()), mu.clone());
            for (k, s) in dirs.iter().enumerate() {
                let num = &(&alpha.partial(s) * self.dp) - &(&alpha * &self.dp.partial(s));
                put(j, k, &(&num * &self.over_dp2));
            }
        }
        for (i, cols) in self.fixed.iter().enumerate() {
            for (k, p) in cols.iter().enumerate() {
                put(a_basis.len() + i, k, p);
            }
        }
        let rows: Vec<Row> = rows.into_values().collect();
        if only_trivial(&rows, ncols) {
            return None;
        }
        let scale_col = ncols - 1;
        for v in nullspace(rows, ncols) {
            if v[scale_col].is_zero() {
                continue;
            }
            let a: Polynomial = a_basis.iter().zip(&v).map(|(mu, c)| c.mul_monomial(mu)).sum();
            let logs: Vec<(Polynomial, Polynomial)> = self
                .vs
                .iter()
                .zip(&v[a_basis.len()..scale_col])
                .map(|(u, e)| (e.clone(), u.clone()))
                .collect();
            if let Some(inv) = normalize(&a, self.dp, &logs) {
                return Some(inv);
            }
        }
        None
    }
}

/// Scales so that the log term with the smallest argument has coefficient
/// one; log coefficients must then be numbers.
fn normalize(a: &Polynomial, dp: &Polynomial, logs: &[(Polynomial, Polynomial)]) -> Option<InvariantForm> {
    let nonzero: Vec<&(Polynomial, Polynomial)> = logs.iter().filter(|(e, _)| !e.is_zero()).collect();
    let Some((e_ref, _)) = nonzero.iter().min_by(|x, y| x.1.cmp_terms(&y.1)).copied() else {
        let r = RationalExpr::new(a.clone(), dp.clone()).ok()?;
        let u = r.num().canonical_unit();
        let inv = InvariantForm::new(r.scale(&u.recip()), Vec::new());
        return (!inv.is_trivial()).then_some(inv);
    };
    let mut coeffs = Vec::new();
    for (e, u) in &nonzero {
        let q = RationalExpr::new(e.clone(), e_ref.clone()).ok()?;
        let c = match (q.num().constant_value(), q.den().constant_value()) {
            (Some(n), Some(d)) => n / d,
            _ => return None,
        };
        coeffs.push((c, u.clone()));
    }
    let rational = RationalExpr::new(a.clone(), dp * e_ref).ok()?;
    Some(InvariantForm::new(rational, coeffs))
}

fn main_monomials(d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for i in 0..=d {
        for j in 0..=d - i {
            for k in 0..=d - i - j {
                out.push(Monomial::from_pairs([(Symbol::x(), i), (Symbol::y(), j), (Symbol::z(), k)]));
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use std::ops::ControlFlow;

    use num_traits::Zero;

    use super::*;
    use crate::darboux::{DarbouxPair, Provenance};
    use crate::io::parse::{parse_invariant, parse_ode, parse_polynomial};
    use crate::ps_solver::{solve_pq_with, SolveBounds};

    const EX1: &str = "-(1/2)*(2*z+3)*(3*z*y^2+z+x-y^3-y-1)/(x-y^3-y)";
    const EX3: &str = "(-c*z^10*a-6*z^6*d*y^5*a+(-b*c+a*d*y^6-c*b*x)*z^5-6*z*d*y^5*b*x+d*y^6*b*x+b*d*y^6)/((-5*z^4)*(a*d*y^6+c*b*x))";

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s).unwrap()
    }

    fn solution(ode: &Ode2, vs: &[&str]) -> PsSolution {
        let pairs: Vec<DarbouxPair> =
            vs.iter().map(|v| DarbouxPair::new(ode, &p(v), Provenance::Hint).unwrap()).collect();
        let mut found = None;
        solve_pq_with(ode, &pairs, &SolveBounds::for_ode(ode), |s| {
            found = Some(s);
            ControlFlow::Break(())
        })
        .unwrap();
        found.unwrap()
    }

    #[test]
    fn one_form_of_first_example() {
        let ode = parse_ode(EX1).unwrap();
        let sol = solution(&ode, &["2*z+3", "x-y^3-y"]);
        let form = exact_one_form(&ode, &sol);
        let [_, _, wz] = form.components().unwrap();
        // -N Q R = -2 (x - y^3 - y) / ((2z + 3)(x - y^3 - y))
        assert_eq!(wz, RationalExpr::new(p("-2"), p("2*z+3")).unwrap());
    }

    #[test]
    fn free_particle_form() {
        let ode = parse_ode("0").unwrap();
        let pair = DarbouxPair::new(&ode, &p("z"), Provenance::Hint).unwrap();
        let sol = PsSolution { pairs: vec![pair], exponents: vec![Coeff::zero()], p: Polynomial::zero(), q: Polynomial::one() };
        let form = exact_one_form(&ode, &sol);
        let [wx, wy, wz] = form.components().unwrap();
        assert!(wx.is_zero() && wy.is_zero());
        assert_eq!(wz, RationalExpr::from_poly(p("-1")));
    }

    #[test]
    fn assembles_first_and_third_examples() {
        let ode = parse_ode(EX1).unwrap();
        let sol = solution(&ode, &["2*z+3", "x-y^3-y"]);
        let form = exact_one_form(&ode, &sol);
        let inv = assemble_invariant(&ode, &sol, &form, &AssembleBounds::default()).unwrap();
        assert_eq!(inv, parse_invariant("x-1+ln((2*z+3)/(x-y^3-y))").unwrap());
        assert!(matches_one_form(&inv, &form));
        assert!(verify_invariant(&ode, &inv).is_verified());

        let ode3 = parse_ode(EX3).unwrap();
        let sol3 = solution(&ode3, &["-c*z^5+d*y^6", "a*z^5+b*x"]);
        let form3 = exact_one_form(&ode3, &sol3);
        let inv3 = assemble_invariant(&ode3, &sol3, &form3, &AssembleBounds::default()).unwrap();
        assert_eq!(inv3, parse_invariant("-x+ln(-c*z^5+d*y^6)-ln(a*z^5+b*x)").unwrap());
    }

    #[test]
    fn verify_rejects_wrong_invariant() {
        let ode = parse_ode(EX1).unwrap();
        let v = verify_invariant(&ode, &parse_invariant("x").unwrap());
        assert_eq!(v, Verdict::Residual(ode.n().clone()));
    }

    #[test]
    fn exponent_enumeration() {
        assert_eq!(denominator_exponents(&[-1, 2, -2]).len(), 6);
        assert_eq!(denominator_exponents(&[-1, -1])[0], vec![0, 0]);
        assert_eq!(denominator_exponents(&[-1, -1])[1], vec![0, 1]);
    }
}
