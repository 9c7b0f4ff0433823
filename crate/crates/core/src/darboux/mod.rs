//! Darboux polynomials of `D = N d/dx + z N d/dy + M d/dz`.

mod ansatz;
mod generate;
mod heuristics;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ode::Ode2;
use crate::poly::Polynomial;

pub use ansatz::{ansatz_search, AnsatzBounds, AnsatzResult};
pub use generate::{generate_ode, InvariantComponents};
pub use heuristics::{
    default_scale_grid, heuristic_den_z, heuristic_m_z, heuristic_n_xy, heuristic_num_xy, ScaleGrid,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DarbouxError {
    #[error("a constant cannot be a Darboux polynomial")]
    Constant,
    #[error("D[v] is not divisible by v")]
    NotDarboux,
}

/// Which extractor produced a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Provenance {
    /// Factor of the `z`-free content of `N`.
    #[serde(rename = "H1")]
    NFactor,
    /// Factor of the `(x, y)`-free content of `M`.
    #[serde(rename = "H2")]
    MFactor,
    /// `z`-antiderivative combined with additive splits of `N`.
    #[serde(rename = "H3")]
    DenZ,
    /// Potential `theta(x, y)` read off the numerator.
    #[serde(rename = "H4")]
    NumXy,
    #[serde(rename = "hint")]
    Hint,
    #[serde(rename = "ansatz")]
    Ansatz,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::NFactor => "H1",
            Provenance::MFactor => "H2",
            Provenance::DenZ => "H3",
            Provenance::NumXy => "H4",
            Provenance::Hint => "hint",
            Provenance::Ansatz => "ansatz",
        })
    }
}

/// `v` with `D[v] = g v`, checked on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarbouxPair {
    v: Polynomial,
    g: Polynomial,
    provenance: Provenance,
}

impl DarbouxPair {
    pub fn new(ode: &Ode2, v: &Polynomial, provenance: Provenance) -> Result<DarbouxPair, DarbouxError> {
        let (v, g) = cofactor(ode, v)?;
        Ok(DarbouxPair { v, g, provenance })
    }

    pub fn v(&self) -> &Polynomial {
        &self.v
    }

    pub fn g(&self) -> &Polynomial {
        &self.g
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// `N p_x + z N p_y + M p_z`.
pub fn apply_d(ode: &Ode2, p: &Polynomial) -> Polynomial {
    ode.apply_d(p)
}

/// Normalizes `v` and returns it with its cofactor `D[v]/v`.
pub fn cofactor(ode: &Ode2, v: &Polynomial) -> Result<(Polynomial, Polynomial), DarbouxError> {
    if v.is_free_of_main() {
        return Err(DarbouxError::Constant);
    }
    let v = v.main_primitive();
    let dv = ode.apply_d(&v);
    let g = dv.exact_divide(&v).map_err(|_| DarbouxError::NotDarboux)?;
    Ok((v, g))
}

/// Merges pairs with equal `v`, keeping the first occurrence.
pub fn dedup(pairs: Vec<DarbouxPair>) -> Vec<DarbouxPair> {
    let mut out: Vec<DarbouxPair> = Vec::new();
    for p in pairs {
        if !out.iter().any(|q| q.v == p.v) {
            out.push(p);
        }
    }
    out
}

/// Verifies each candidate, silently skipping the ones that fail.
pub(crate) fn verified(ode: &Ode2, candidates: Vec<Polynomial>, provenance: Provenance) -> Vec<DarbouxPair> {
    let pairs = candidates
        .iter()
        .filter(|v| !v.is_free_of_main())
        .filter_map(|v| DarbouxPair::new(ode, v, provenance).ok())
        .collect();
    dedup(pairs)
}
