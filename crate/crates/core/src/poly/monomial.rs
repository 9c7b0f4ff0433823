use std::cmp::Ordering;
use std::fmt;

use super::symbol::Symbol;

/// A power product of symbols, stored sparsely as `(symbol, exponent)` pairs
/// sorted by symbol with every exponent positive.
///
/// Monomials compare lexicographically with `x > y > z > parameters`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(s: Symbol) -> Monomial {
        Monomial(vec![(s, 1)])
    }

    pub fn var_pow(s: Symbol, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(s, e)])
        }
    }

    /// Builds a monomial from arbitrary pairs; repeated symbols are merged and
    /// zero exponents dropped.
    pub fn from_pairs<I: IntoIterator<Item = (Symbol, u32)>>(pairs: I) -> Monomial {
        let mut v: Vec<(Symbol, u32)> = pairs.into_iter().filter(|(_, e)| *e > 0).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Symbol, u32)> = Vec::with_capacity(v.len());
        for (s, e) in v {
            match out.last_mut() {
                Some((t, f)) if *t == s => *f += e,
                _ => out.push((s, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    /// Total degree counting only `x`, `y`, `z`.
    pub fn main_degree(&self) -> u32 {
        self.0
            .iter()
            .filter(|(s, _)| s.is_main())
            .map(|(_, e)| e)
            .sum()
    }

    pub fn degree_in(&self, s: &Symbol) -> u32 {
        self.0
            .iter()
            .find(|(t, _)| t == s)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn has_main(&self) -> bool {
        self.0.iter().any(|(s, _)| s.is_main())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|(s, e)| other.degree_in(s) >= *e)
    }

    /// `self / other`, or `None` when `other` does not divide `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        let b = &other.0;
        for (s, e) in &self.0 {
            let mut d = 0;
            if j < b.len() && b[j].0 == *s {
                d = b[j].1;
                j += 1;
            } else if j < b.len() && b[j].0 < *s {
                return None;
            }
            if d > *e {
                return None;
            }
            if *e > d {
                out.push((s.clone(), e - d));
            }
        }
        if j < b.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// The monomial with `s` removed, together with the removed exponent.
    pub fn split_off(&self, s: &Symbol) -> (u32, Monomial) {
        let e = self.degree_in(s);
        let rest = self.0.iter().filter(|(t, _)| t != s).cloned().collect();
        (e, Monomial(rest))
    }

    /// Splits into the part over `vars` and the remainder.
    pub fn partition(&self, in_set: impl Fn(&Symbol) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(s, _)| in_set(s));
        (Monomial(a), Monomial(b))
    }

    /// Exponent decrease in `s` by one, returning the old exponent.
    pub fn lower(&self, s: &Symbol) -> Option<(u32, Monomial)> {
        let e = self.degree_in(s);
        if e == 0 {
            return None;
        }
        let v = self
            .0
            .iter()
            .filter_map(|(t, f)| {
                if t == s {
                    (*f > 1).then(|| (t.clone(), f - 1))
                } else {
                    Some((t.clone(), *f))
                }
            })
            .collect();
        Some((e, Monomial(v)))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|(s, e)| {
                    let f = other.degree_in(s);
                    (f > 0).then(|| (s.clone(), (*e).min(f)))
                })
                .collect(),
        )
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.0.iter().map(|(s, _)| s)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        for i in 0..a.len().min(b.len()) {
            match a[i].0.cmp(&b[i].0) {
                // `self` has a positive power of a higher-priority symbol.
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match a[i].1.cmp(&b[i].1) {
                    Ordering::Equal => continue,
                    o => return o,
                },
            }
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    /// Parameters first (alphabetically), then `x`, `y`, `z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let params = self.0.iter().filter(|(s, _)| s.is_parameter());
        let mains = self.0.iter().filter(|(s, _)| s.is_main());
        let mut first = true;
        for (s, e) in params.chain(mains) {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
