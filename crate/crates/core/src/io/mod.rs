//! Text in and out: parsing, rendering and the run report.

pub mod parse;
pub mod render;
pub mod report;

pub use parse::{parse_invariant, parse_ode, parse_polynomial, parse_rational, ParseError, ParseErrorKind};
pub use render::{render_invariant, render_polynomial, render_rational};
pub use report::{OdeReport, PairReport, Report, SCHEMA};
