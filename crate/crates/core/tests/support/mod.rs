//! Equations, strategies and property suites shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use darboux::cli::{find_pairs, search, Heuristic, RunConfig};
use darboux::darboux::{
    ansatz_search, cofactor, default_scale_grid, generate_ode, heuristic_den_z, heuristic_m_z, heuristic_n_xy,
    heuristic_num_xy, AnsatzBounds, DarbouxPair, InvariantComponents, Provenance,
};
use darboux::integrate::InvariantForm;
use darboux::io::{parse_invariant, parse_ode, parse_polynomial, render_invariant, render_polynomial};
use darboux::ode::Ode2;
use darboux::ps_solver::ExponentGrid;
use darboux::poly::{factor_limited, Coeff, Monomial, Polynomial, RationalExpr, Symbol};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const EX1: &str = "-(1/2)*(2*z+3)*(3*z*y^2+z+x-y^3-y-1)/(x-y^3-y)";
/// The second example exactly as printed.
pub const EX2_PRINTED: &str = "((2*C*b*x*y+2*C*b-x*b)*z^2 + (-y*b+2*C*a*x^2*y+2*C*a*x+x*c*y+2*c+2*C*c*y^2*x+2*C*c*y-x^2*a)*z + y*a*x+2*a-y^2*c)/(2*(x*y+1)*(B*a*x+B*b*z+B*c*y+b))";
/// The second example with the overall sign that makes the printed
/// cofactors and invariant consistent.
pub const EX2: &str = "-((2*C*b*x*y+2*C*b-x*b)*z^2 + (-y*b+2*C*a*x^2*y+2*C*a*x+x*c*y+2*c+2*C*c*y^2*x+2*C*c*y-x^2*a)*z + y*a*x+2*a-y^2*c)/(2*(x*y+1)*(B*a*x+B*b*z+B*c*y+b))";
pub const EX3: &str = "(-c*z^10*a-6*z^6*d*y^5*a+(-b*c+a*d*y^6-c*b*x)*z^5-6*z*d*y^5*b*x+d*y^6*b*x+b*d*y^6)/((-5*z^4)*(a*d*y^6+c*b*x))";
pub const EX4: &str = "-(a*z^2-z-2*a*z+a)*(4*z*y^3+3*b*x^2)/((b*x^3+y^4)*(3*z^4*a-3*z^3-6*z^3*a+3*z^2*b*x^3+3*z^2*y^4+2*a*z^2+z+a-b*x^3-y^4+1))";

pub const CASES: u32 = 256;
const SEED: [u8; 32] = *b"darboux-property-suites-seed-001";

pub fn p(s: &str) -> Polynomial {
    parse_polynomial(s).unwrap()
}

pub fn ode(s: &str) -> Ode2 {
    parse_ode(s).unwrap()
}

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, max_global_rejects: 100_000, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

/// `a * b = c * d` for polynomials: equality up to a scale factor when
/// `b` and `d` are the normalizers of `a` and `c`.
pub fn projective_eq(p1: &Polynomial, q1: &Polynomial, p2: &Polynomial, q2: &Polynomial) -> bool {
    !q1.is_zero() && !q2.is_zero() && &(p1 * q2) == &(p2 * q1)
}

fn symbol(name: &'static str) -> Symbol {
    Symbol::new(name)
}

/// Sums of up to `max_terms` terms with exponents below `max_exp` in the
/// given symbols and integer coefficients in `-3..=3`.
pub fn poly_strategy(symbols: &'static [&'static str], max_exp: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    let n = symbols.len();
    prop::collection::vec((-3i64..=3, prop::collection::vec(0..max_exp, n)), 0..=max_terms).prop_map(move |terms| {
        terms
            .into_iter()
            .map(|(c, exps)| {
                let m = Monomial::from_pairs(symbols.iter().zip(exps).map(|(s, e)| (symbol(s), e)));
                Polynomial::term(Coeff::from_integer(BigInt::from(c)), m)
            })
            .sum()
    })
}

/// As [`poly_strategy`] with total degree at most `deg`.
pub fn bounded_poly(symbols: &'static [&'static str], deg: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    poly_strategy(symbols, deg + 1, max_terms).prop_map(move |p| {
        Polynomial::from_terms(p.terms().filter(|(m, _)| m.degree() <= deg).map(|(m, c)| (m.clone(), c.clone())))
    })
}

fn rational_poly() -> impl Strategy<Value = Polynomial> {
    (poly_strategy(&["x", "y", "z", "a", "b"], 4, 5), 1i64..=6).prop_map(|(p, d)| p.scale(&Coeff::new(BigInt::from(1), BigInt::from(d))))
}

fn nonzero(s: impl Strategy<Value = Polynomial>) -> impl Strategy<Value = Polynomial> {
    s.prop_filter("nonzero", |p| !p.is_zero())
}

fn main_nonconstant(s: impl Strategy<Value = Polynomial>) -> impl Strategy<Value = Polynomial> {
    s.prop_filter("depends on x, y or z", |p| !p.is_free_of_main())
}

/// `D[p q] = p D[q] + q D[p]`.
pub fn leibniz(cases: u32) -> Result<(), String> {
    let xyz: &'static [&'static str] = &["x", "y", "z", "a"];
    let strat = (poly_strategy(xyz, 3, 4), nonzero(poly_strategy(xyz, 3, 3)), poly_strategy(xyz, 3, 4), poly_strategy(xyz, 3, 4));
    runner(cases)
        .run(&strat, |(m, n, f, g)| {
            let ode = Ode2::new(m, n).unwrap();
            let lhs = ode.apply_d(&(&f * &g));
            let rhs = &(&f * &ode.apply_d(&g)) + &(&g * &ode.apply_d(&f));
            prop_assert_eq!(lhs, rhs);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// `g(v1 v2) = g(v1) + g(v2)` for `(x, y)` factors of the denominator.
pub fn cofactor_closure(cases: u32) -> Result<(), String> {
    let xy: &'static [&'static str] = &["x", "y", "a"];
    let strat = (
        main_nonconstant(poly_strategy(xy, 3, 3)),
        main_nonconstant(poly_strategy(xy, 3, 3)),
        nonzero(poly_strategy(&["x", "y", "z"], 2, 2)),
        poly_strategy(&["x", "y", "z", "a"], 3, 4),
    );
    runner(cases)
        .run(&strat, |(v1, v2, n0, m)| {
            let ode = Ode2::new(m, &(&v1 * &v2) * &n0).unwrap();
            let (Ok((_, g1)), Ok((_, g2))) = (cofactor(&ode, &v1), cofactor(&ode, &v2)) else {
                return Err(TestCaseError::reject("factor cancelled against M"));
            };
            let (_, g12) = cofactor(&ode, &(&v1 * &v2)).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(g12, &g1 + &g2);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// `exact_divide(p v, v) = p`.
pub fn exact_division(cases: u32) -> Result<(), String> {
    let strat = (rational_poly(), nonzero(rational_poly()));
    runner(cases)
        .run(&strat, |(p, v)| {
            let q = (&p * &v).exact_divide(&v).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(q, p);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Rendering then parsing gives back the same polynomial or invariant.
pub fn round_trip(cases: u32) -> Result<(), String> {
    let logs = prop::collection::vec((prop::sample::select(vec![(1i64, 1i64), (-1, 1), (1, 2), (-3, 2), (2, 1)]), main_nonconstant(poly_strategy(&["x", "y", "z", "b"], 3, 3))), 0..=2);
    let strat = (rational_poly(), nonzero(poly_strategy(&["x", "y", "z"], 3, 3)), logs);
    runner(cases)
        .run(&strat, |(a, d, logs)| {
            let back = parse_polynomial(&render_polynomial(&a)).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(&back, &a);
            let compact = parse_polynomial(&a.to_compact_string()).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(&compact, &a);
            let logs = logs
                .into_iter()
                .map(|((n, k), u)| (Coeff::new(BigInt::from(n), BigInt::from(k)), u))
                .collect();
            let inv = InvariantForm::new(RationalExpr::new(a, d).unwrap(), logs);
            let text = render_invariant(&inv);
            let parsed = parse_invariant(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
            prop_assert_eq!(parsed, inv, "{}", text);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Components `A/Dp + ln(B/C)` of total degree at most three.
pub fn components() -> impl Strategy<Value = InvariantComponents> {
    let xyz: &'static [&'static str] = &["x", "y", "z"];
    (
        bounded_poly(xyz, 3, 2),
        prop::bool::weighted(0.25),
        main_nonconstant(bounded_poly(xyz, 3, 3)),
        main_nonconstant(bounded_poly(xyz, 3, 3)),
        prop::bool::ANY,
    )
        .prop_map(|(a, dp_is_b, b, c, c_is_one)| {
            let c = if c_is_one { Polynomial::one() } else { c };
            let dp = if dp_is_b { b.clone() } else { Polynomial::one() };
            InvariantComponents { a, dp, b, c }
        })
}

/// Candidate pairs for a generated equation: the structural extractors
/// and the factors of the components.
pub fn component_pairs(ode: &Ode2, comps: &InvariantComponents) -> Vec<DarbouxPair> {
    let config = RunConfig { heuristics: vec![Heuristic::H1, Heuristic::H2, Heuristic::H3, Heuristic::H4], ..RunConfig::default() };
    let (mut pairs, _) = find_pairs(ode, &config);
    for c in [&comps.b, &comps.c, &comps.dp] {
        for f in factor_limited(c, 8).factors {
            if let Ok(pair) = DarbouxPair::new(ode, &f.poly, Provenance::Hint) {
                if !pairs.iter().any(|q| q.v() == pair.v()) {
                    pairs.push(pair);
                }
            }
        }
    }
    pairs
}

/// An equation generated from random components gives back a verified
/// invariant.
pub fn generate_round_trip(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&components(), |comps| {
            let Ok(ode) = generate_ode(&comps) else {
                return Err(TestCaseError::reject("I_z vanishes"));
            };
            let original = InvariantForm::from_components(&comps);
            prop_assert!(original.verify(&ode).is_verified());
            if original.is_trivial() {
                return Err(TestCaseError::reject("constant invariant"));
            }
            let pairs = component_pairs(&ode, &comps);
            let deepest = factor_limited(&comps.dp, 8).factors.iter().map(|f| i64::from(f.multiplicity) + 1).max().unwrap_or(0);
            let config = RunConfig { m_grid: ExponentGrid::new(deepest.max(3), &[1, 2]), ..RunConfig::default() };
            let deadline = Instant::now() + Duration::from_secs(10);
            let found = search(&ode, &pairs, &config, Some(deadline));
            let Some((_, inv)) = found else {
                return Err(TestCaseError::fail(format!("no invariant for {ode} from {comps:?}")));
            };
            prop_assert!(inv.verify(&ode).is_verified());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Ansatz bounds just large enough to contain `v`.
pub fn tailored_bounds(v: &Polynomial) -> AnsatzBounds {
    let coeff = v.terms().map(|(_, c)| c.numer().abs()).max().unwrap_or_else(BigInt::zero);
    let params = v
        .terms()
        .map(|(m, _)| m.degree() - m.main_degree())
        .max()
        .unwrap_or(0);
    AnsatzBounds::new(v.main_degree(), u32::try_from(coeff).unwrap_or(u32::MAX), params)
        .with_max_terms(v.num_terms())
}

pub fn heuristic_pairs(ode: &Ode2) -> Vec<DarbouxPair> {
    let grid = default_scale_grid(ode);
    let mut out = heuristic_n_xy(ode);
    out.extend(heuristic_m_z(ode));
    out.extend(heuristic_den_z(ode, &grid));
    out.extend(heuristic_num_xy(ode, &grid));
    out
}

#[derive(Clone, Debug)]
pub struct Containment {
    pub example: usize,
    pub v: Polynomial,
    pub provenance: Provenance,
    pub found: bool,
    pub truncated: bool,
    pub examined: u64,
    pub seconds: f64,
}

static CONTAINMENT: Mutex<Option<HashMap<(usize, String), Containment>>> = Mutex::new(None);

/// Runs the ansatz with bounds tailored to one heuristic pair; cached.
pub fn containment(example: usize, pair: &DarbouxPair, budget: Duration) -> Containment {
    let key = (example, pair.v().to_string());
    if let Some(c) = CONTAINMENT.lock().unwrap().get_or_insert_with(HashMap::new).get(&key) {
        return c.clone();
    }
    let ode = ode([EX1, EX2, EX3, EX4][example]);
    let mut bounds = tailored_bounds(pair.v());
    let start = Instant::now();
    bounds.deadline = Some(start + budget);
    let result = ansatz_search(&ode, &bounds);
    let c = Containment {
        example,
        v: pair.v().clone(),
        provenance: pair.provenance(),
        found: result.pairs.iter().any(|q| q.v() == pair.v()),
        truncated: result.truncated,
        examined: result.examined,
        seconds: start.elapsed().as_secs_f64(),
    };
    CONTAINMENT.lock().unwrap().get_or_insert_with(HashMap::new).insert(key, c.clone());
    c
}

/// Every pair the structural extractors return on the four examples is
/// also returned by the ansatz over the smallest grid containing it.
pub fn oracle_containment(cases: u32, budget: Duration) -> Result<(), String> {
    let odes: Vec<Ode2> = [EX1, EX2, EX3, EX4].iter().map(|s| ode(s)).collect();
    let pairs: Vec<Vec<DarbouxPair>> = odes.iter().map(heuristic_pairs).collect();
    let strat = (0usize..4, any::<prop::sample::Index>());
    runner(cases)
        .run(&strat, |(ex, idx)| {
            if pairs[ex].is_empty() {
                return Ok(());
            }
            let pair = idx.get(&pairs[ex]);
            let c = containment(ex, pair, budget);
            prop_assert!(
                c.found,
                "example {} pair {} [{}] not found by the ansatz ({} candidates in {:.1}s, truncated: {})",
                ex + 1,
                c.v,
                c.provenance,
                c.examined,
                c.seconds,
                c.truncated
            );
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn cached_containment() -> Vec<Containment> {
    let mut v: Vec<Containment> = CONTAINMENT.lock().unwrap().get_or_insert_with(HashMap::new).values().cloned().collect();
    v.sort_by(|a, b| (a.example, a.v.to_string()).cmp(&(b.example, b.v.to_string())));
    v
}
