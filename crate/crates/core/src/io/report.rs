//! The run report, as text or as JSON with a fixed field order.

use std::fmt::Write;

use serde::Serialize;

use crate::darboux::{DarbouxPair, Provenance};
use crate::ode::Ode2;
use crate::poly::fmt_coeff;
use crate::ps_solver::PowerProduct;

pub const SCHEMA: u32 = 1;

pub const VERIFIED: &str = "verified: D[I]=0";
pub const NOT_VERIFIED: &str = "not verified";
pub const NO_SOLUTION: &str = "no solution within bounds";
pub const PAIRS_ONLY: &str = "darboux pairs only";

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct OdeReport {
    pub m: String,
    pub n: String,
    /// `M0 / N0 = (scale * cancelled * M) / (scale * cancelled * N)` for the
    /// input before reduction.
    pub scale: String,
    pub cancelled: String,
}

impl OdeReport {
    pub fn new(ode: &Ode2) -> OdeReport {
        let norm = ode.normalization();
        OdeReport {
            m: ode.m().to_string(),
            n: ode.n().to_string(),
            scale: fmt_coeff(&norm.scale),
            cancelled: norm.cancelled.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PairReport {
    pub v: String,
    pub cofactor: String,
    pub provenance: Provenance,
}

impl PairReport {
    pub fn new(pair: &DarbouxPair) -> PairReport {
        PairReport { v: pair.v().to_string(), cofactor: pair.g().to_string(), provenance: pair.provenance() }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FactorReport {
    pub factor: String,
    pub exponent: String,
}

pub fn factor_reports(r: &PowerProduct) -> Vec<FactorReport> {
    r.factors
        .iter()
        .map(|(v, m)| FactorReport { factor: v.to_string(), exponent: fmt_coeff(m) })
        .collect()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BoundsReport {
    pub heuristics: Vec<String>,
    pub max_deg: u32,
    pub coeff_bound: u32,
    pub param_deg: u32,
    pub max_terms: usize,
    pub m_grid: Vec<String>,
    pub pq_deg: u32,
    pub a_deg: Option<u32>,
    pub timeout_seconds: Option<u64>,
    pub ansatz_truncated: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub input: String,
    pub ode: OdeReport,
    pub darboux: Vec<PairReport>,
    pub exponents: Vec<String>,
    #[serde(rename = "P")]
    pub p: Option<String>,
    #[serde(rename = "Q")]
    pub q: Option<String>,
    #[serde(rename = "R")]
    pub r: Vec<FactorReport>,
    pub invariant: Option<String>,
    pub verified: bool,
    pub verdict: String,
    pub residual: Option<String>,
    pub bounds: Option<BoundsReport>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str, input: &str, ode: &Ode2) -> Report {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            input: input.to_string(),
            ode: OdeReport::new(ode),
            darboux: Vec::new(),
            exponents: Vec::new(),
            p: None,
            q: None,
            r: Vec::new(),
            invariant: None,
            verified: false,
            verdict: String::new(),
            residual: None,
            bounds: None,
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "ode: y'' = ({}) / ({})", self.ode.m, self.ode.n);
        for pair in &self.darboux {
            let _ = writeln!(s, "darboux [{}]: {}  cofactor {}", pair.provenance, pair.v, pair.cofactor);
        }
        if !self.exponents.is_empty() {
            let _ = writeln!(s, "exponents: {}", self.exponents.join(", "));
        }
        if let (Some(p), Some(q)) = (&self.p, &self.q) {
            let _ = writeln!(s, "P: {p}");
            let _ = writeln!(s, "Q: {q}");
        }
        if !self.r.is_empty() {
            let r: Vec<String> = self.r.iter().map(|f| format!("({})^({})", f.factor, f.exponent)).collect();
            let _ = writeln!(s, "R: {}", r.join(" * "));
        }
        if let Some(inv) = &self.invariant {
            let _ = writeln!(s, "invariant: {inv}");
        }
        if let Some(res) = &self.residual {
            let _ = writeln!(s, "residual: {res}");
        }
        for note in &self.notes {
            let _ = writeln!(s, "note: {note}");
        }
        let _ = writeln!(s, "verdict: {}", self.verdict);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse::parse_ode;

    #[test]
    fn field_order_is_stable() {
        let ode = parse_ode("x/(2*y)").unwrap();
        let mut r = Report::new("solve", "x/(2*y)", &ode);
        r.verdict = PAIRS_ONLY.to_string();
        let json = r.to_json();
        let keys = ["\"schema\": 1", "\"ode\"", "\"darboux\"", "\"exponents\"", "\"P\"", "\"Q\"", "\"R\"", "\"invariant\": null", "\"verified\": false", "\"bounds\""];
        let pos: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap_or_else(|| panic!("{k}"))).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(json, r.clone().to_json());
        assert!(r.to_text().contains("verdict: darboux pairs only"));
    }
}
