//! Command-line front end: `solve`, `darboux`, `generate` and `verify`.

use std::io::Read;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::darboux::{
    ansatz_search, dedup, default_scale_grid, generate_ode, heuristic_den_z, heuristic_m_z, heuristic_n_xy,
    heuristic_num_xy, AnsatzBounds, DarbouxPair, InvariantComponents, Provenance,
};
use crate::integrate::{assemble_invariant, exact_one_form, verify_invariant, AssembleBounds, InvariantForm, Verdict};
use crate::io::parse::{parse_invariant, parse_ode, parse_polynomial, parse_rational, ParseError};
use crate::io::render::render_invariant;
use crate::io::report::{factor_reports, BoundsReport, PairReport, Report, NOT_VERIFIED, NO_SOLUTION, PAIRS_ONLY, VERIFIED};
use crate::ode::Ode2;
use crate::poly::{fmt_coeff, Coeff, Polynomial};
use crate::ps_solver::{integrating_factor, solve_pq_with, ExponentGrid, PsError, PsSolution, SolveBounds};

/// Largest number of pairs handed to the compatibility solver at once.
const GROUP: usize = 3;
const MAX_GROUP: usize = 4;

#[derive(Parser, Debug)]
#[command(name = "darboux", version, about = "First integrals of y'' = M(x,y,z)/N(x,y,z), z = y'")]
#[command(after_help = "Expressions use + - * / ^, parentheses, integer and rational literals, and identifiers. \
x, y and z are the variables (z stands for y'); every other identifier is a parameter. \
An integer literal followed by / and another integer literal is one rational literal, so x/2/3 is x/(2/3).")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find Darboux pairs, integrating factor and first integral.
    Solve {
        /// Right-hand side of y'' = phi; read from standard input when absent.
        #[arg(allow_hyphen_values = true)]
        ode: Option<String>,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// List the Darboux pairs found, without solving.
    Darboux {
        #[arg(allow_hyphen_values = true)]
        ode: Option<String>,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Print the equation having A/D + ln(B/C) as a first integral.
    Generate {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        d: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[arg(allow_hyphen_values = true)]
        c: String,
    },
    /// Check that an expression is a first integral of the equation.
    Verify {
        #[arg(allow_hyphen_values = true)]
        ode: String,
        #[arg(allow_hyphen_values = true)]
        invariant: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Heuristic {
    #[value(name = "H1")]
    H1,
    #[value(name = "H2")]
    H2,
    #[value(name = "H3")]
    H3,
    #[value(name = "H4")]
    H4,
    #[value(name = "ansatz")]
    Ansatz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Args, Debug, Clone)]
pub struct RunOptions {
    /// Extractors to run, comma separated.
    #[arg(long, value_delimiter = ',', ignore_case = true, default_value = "H1,H2,H3,H4,ansatz")]
    pub heuristics: Vec<Heuristic>,
    /// Total degree of ansatz candidates in x, y, z.
    #[arg(long, default_value_t = 2)]
    pub max_deg: u32,
    /// Largest absolute integer coefficient of ansatz candidates.
    #[arg(long, default_value_t = 1)]
    pub coeff_bound: u32,
    /// Degree of the parameter monomials in ansatz candidates.
    #[arg(long, default_value_t = 1)]
    pub param_deg: u32,
    /// Largest number of terms of an ansatz candidate.
    #[arg(long, default_value_t = 4)]
    pub max_terms: usize,
    /// Largest number of ansatz candidates examined.
    #[arg(long, default_value_t = 2_000_000)]
    pub max_candidates: u64,
    /// Exponent values, comma separated (e.g. "-1,-1/2,1"); integers and
    /// halves up to 3 in absolute value when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub m_grid: Option<Vec<String>>,
    /// Degree bound for P and Q; one more than the degree of the equation when absent.
    #[arg(long)]
    pub pq_deg: Option<u32>,
    /// Degree bound for the numerator A of the invariant.
    #[arg(long)]
    pub a_deg: Option<u32>,
    /// Candidate Darboux polynomial; may be repeated.
    #[arg(long, allow_hyphen_values = true)]
    pub hint: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Wall-clock limit for the search; no limit when absent
    #[arg(long)]
    pub timeout_seconds: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> RunOptions {
        RunOptions {
            heuristics: vec![Heuristic::H1, Heuristic::H2, Heuristic::H3, Heuristic::H4, Heuristic::Ansatz],
            max_deg: 2,
            coeff_bound: 1,
            param_deg: 1,
            max_terms: 4,
            max_candidates: 2_000_000,
            m_grid: None,
            pq_deg: None,
            a_deg: None,
            hint: Vec::new(),
            format: Format::Text,
            timeout_seconds: None,
        }
    }
}

/// Validated settings for one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub heuristics: Vec<Heuristic>,
    pub ansatz: AnsatzBounds,
    pub m_grid: ExponentGrid,
    pub pq_deg: Option<u32>,
    pub a_deg: Option<u32>,
    pub hints: Vec<Polynomial>,
    pub format: Format,
    pub timeout: Option<Duration>,
}

impl RunConfig {
    pub fn from_options(opts: &RunOptions) -> Result<RunConfig, String> {
        let m_grid = match &opts.m_grid {
            None => ExponentGrid::default(),
            Some(items) => {
                let mut values: Vec<Coeff> = Vec::new();
                for s in items {
                    let v = parse_rational(s)
                        .ok()
                        .filter(|r| r.num().is_constant() && r.den().is_constant())
                        .and_then(|r| r.num().constant_value().zip(r.den().constant_value()))
                        .map(|(n, d)| n / d)
                        .ok_or_else(|| format!("--m-grid: `{s}` is not a rational number"))?;
                    if !values.contains(&v) {
                        values.push(v);
                    }
                }
                ExponentGrid::from_values(values)
            }
        };
        if opts.max_deg == 0 || opts.coeff_bound == 0 || opts.max_terms == 0 {
            return Err("--max-deg, --coeff-bound and --max-terms must be positive".to_string());
        }
        let hints = opts
            .hint
            .iter()
            .map(|h| parse_polynomial(h).map_err(|e| format!("--hint `{h}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        let mut ansatz = AnsatzBounds::new(opts.max_deg, opts.coeff_bound, opts.param_deg).with_max_terms(opts.max_terms);
        ansatz.max_candidates = Some(opts.max_candidates);
        Ok(RunConfig {
            heuristics: opts.heuristics.clone(),
            ansatz,
            m_grid,
            pq_deg: opts.pq_deg,
            a_deg: opts.a_deg,
            hints,
            format: opts.format,
            timeout: opts.timeout_seconds.map(Duration::from_secs),
        })
    }

    fn enabled(&self, h: Heuristic) -> bool {
        self.heuristics.contains(&h)
    }

    fn bounds_report(&self, ode: &Ode2, truncated: bool) -> BoundsReport {
        BoundsReport {
            heuristics: self
                .heuristics
                .iter()
                .map(|h| h.to_possible_value().expect("named").get_name().to_string())
                .collect(),
            max_deg: self.ansatz.max_deg,
            coeff_bound: self.ansatz.coeff_bound,
            param_deg: self.ansatz.param_deg,
            max_terms: self.ansatz.max_terms,
            m_grid: self.m_grid.values().iter().map(fmt_coeff).collect(),
            pq_deg: self.pq_deg.unwrap_or(ode.degree() + 1),
            a_deg: self.a_deg,
            timeout_seconds: self.timeout.map(|d| d.as_secs()),
            ansatz_truncated: truncated,
        }
    }
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig::from_options(&RunOptions::default()).expect("defaults are valid")
    }
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Verified,
    NoSolution,
    InputError,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Verified => 0,
            Status::NoSolution => 1,
            Status::InputError => 2,
        }
    }
}

/// Everything a solve run produced.
#[derive(Clone, Debug)]
pub struct SolveRun {
    pub ode: Ode2,
    pub pairs: Vec<DarbouxPair>,
    pub solution: Option<PsSolution>,
    pub invariant: Option<InvariantForm>,
    pub notes: Vec<String>,
    pub ansatz_truncated: bool,
    pub report: Report,
    pub status: Status,
}

/// Hints followed by the enabled structural extractors, deduplicated.
pub fn find_pairs(ode: &Ode2, config: &RunConfig) -> (Vec<DarbouxPair>, Vec<String>) {
    let mut pairs = Vec::new();
    let mut notes = Vec::new();
    if config.enabled(Heuristic::H1) {
        pairs.extend(heuristic_n_xy(ode));
    }
    if config.enabled(Heuristic::H2) {
        pairs.extend(heuristic_m_z(ode));
    }
    let grid = default_scale_grid(ode);
    if config.enabled(Heuristic::H3) {
        pairs.extend(heuristic_den_z(ode, &grid));
    }
    if config.enabled(Heuristic::H4) {
        pairs.extend(heuristic_num_xy(ode, &grid));
    }
    for h in &config.hints {
        match DarbouxPair::new(ode, h, Provenance::Hint) {
            Ok(p) => pairs.push(p),
            Err(e) => notes.push(format!("hint {h} discarded: {e}")),
        }
    }
    (dedup(pairs), notes)
}

/// First verified invariant from the pairs, in groups of three and then
/// four pairs. The degree of `Q` is raised one step at a time across all
/// groups.
pub fn search(
    ode: &Ode2,
    pairs: &[DarbouxPair],
    config: &RunConfig,
    deadline: Option<Instant>,
) -> Option<(PsSolution, InvariantForm)> {
    if pairs.is_empty() {
        return None;
    }
    let assemble = AssembleBounds { a_deg: config.a_deg };
    let top = config.pq_deg.unwrap_or(ode.degree() + 1);
    let groups: Vec<Vec<DarbouxPair>> = (GROUP.min(pairs.len())..=MAX_GROUP.min(pairs.len()))
        .flat_map(|k| subsets(pairs.len(), k))
        .map(|idx| idx.iter().map(|&i| pairs[i].clone()).collect())
        .collect();
    for level in 0..=top {
        let bounds = SolveBounds {
            grid: config.m_grid.clone(),
            deg_bound: top,
            q_level: Some(level),
            max_grid_points: 1_000_000,
            deadline,
        };
        for group in &groups {
            let mut found = None;
            let status = solve_pq_with(ode, group, &bounds, |sol| {
                let form = exact_one_form(ode, &sol);
                match assemble_invariant(ode, &sol, &form, &assemble) {
                    Ok(inv) if verify_invariant(ode, &inv).is_verified() => {
                        found = Some((sol, inv));
                        ControlFlow::Break(())
                    }
                    _ => ControlFlow::Continue(()),
                }
            });
            if found.is_some() || status == Err(PsError::Deadline) {
                return found;
            }
        }
    }
    None
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else { return out };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Heuristics and hints, then the ansatz when they do not lead to an
/// invariant.
pub fn run_solve(input: &str, ode: Ode2, config: &RunConfig) -> SolveRun {
    let deadline = config.timeout.map(|t| Instant::now() + t);
    let (mut pairs, notes) = find_pairs(&ode, config);
    let mut found = search(&ode, &pairs, config, deadline);
    let mut truncated = false;
    if found.is_none() && config.enabled(Heuristic::Ansatz) && !deadline.is_some_and(|d| Instant::now() > d) {
        let mut bounds = config.ansatz.clone();
        bounds.deadline = deadline;
        let result = ansatz_search(&ode, &bounds);
        truncated = result.truncated;
        let before = pairs.len();
        pairs.extend(result.pairs);
        pairs = dedup(pairs);
        if pairs.len() > before {
            found = search(&ode, &pairs, config, deadline);
        }
    }
    let mut report = Report::new("solve", input, &ode);
    report.darboux = pairs.iter().map(PairReport::new).collect();
    report.notes = notes.clone();
    report.bounds = Some(config.bounds_report(&ode, truncated));
    let status = match &found {
        Some((sol, inv)) => {
            fill_solution(&mut report, sol, inv);
            report.verified = true;
            report.verdict = VERIFIED.to_string();
            Status::Verified
        }
        None => {
            report.verdict = NO_SOLUTION.to_string();
            Status::NoSolution
        }
    };
    let (solution, invariant) = found.map_or((None, None), |(s, i)| (Some(s), Some(i)));
    SolveRun { ode, pairs, solution, invariant, notes, ansatz_truncated: truncated, report, status }
}

fn fill_solution(report: &mut Report, sol: &PsSolution, inv: &InvariantForm) {
    report.exponents = sol.exponents.iter().map(fmt_coeff).collect();
    report.p = Some(sol.p.to_string());
    report.q = Some(sol.q.to_string());
    report.r = factor_reports(&integrating_factor(sol));
    report.invariant = Some(render_invariant(inv));
}

/// Pairs only; the ansatz runs when it is enabled and the structural
/// extractors find nothing.
pub fn run_darboux(input: &str, ode: &Ode2, config: &RunConfig) -> Report {
    let (mut pairs, notes) = find_pairs(ode, config);
    let mut truncated = false;
    if pairs.is_empty() && config.enabled(Heuristic::Ansatz) {
        let mut bounds = config.ansatz.clone();
        bounds.deadline = config.timeout.map(|t| Instant::now() + t);
        let result = ansatz_search(ode, &bounds);
        truncated = result.truncated;
        pairs = dedup(result.pairs);
    }
    let mut report = Report::new("darboux", input, ode);
    report.darboux = pairs.iter().map(PairReport::new).collect();
    report.notes = notes;
    report.bounds = Some(config.bounds_report(ode, truncated));
    report.verdict = PAIRS_ONLY.to_string();
    report
}

/// Output text and exit status of one command line.
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub status: Status,
}

impl Outcome {
    fn input_error(msg: String) -> Outcome {
        Outcome { stdout: String::new(), stderr: format!("error: {msg}\n"), status: Status::InputError }
    }
}

fn read_input(arg: &Option<String>) -> Result<String, String> {
    match arg {
        Some(s) => Ok(s.clone()),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| format!("reading standard input: {e}"))?;
            Ok(s.trim().to_string())
        }
    }
}

fn parse_input(text: &str, what: &str) -> Result<Ode2, String> {
    parse_ode(text).map_err(|e| located(what, text, &e))
}

fn located(what: &str, text: &str, e: &ParseError) -> String {
    format!("{what}: {e}\n  {text}\n  {}^", " ".repeat(text[..e.position.min(text.len())].chars().count()))
}

fn emit(report: &Report, format: Format, status: Status) -> Outcome {
    let stdout = match format {
        Format::Text => report.to_text(),
        Format::Structured => report.to_json() + "\n",
    };
    Outcome { stdout, stderr: String::new(), status }
}

pub fn execute(cmd: &Command) -> Outcome {
    match cmd {
        Command::Solve { ode, opts } | Command::Darboux { ode, opts } => {
            let config = match RunConfig::from_options(opts) {
                Ok(c) => c,
                Err(e) => return Outcome::input_error(e),
            };
            let text = match read_input(ode) {
                Ok(t) => t,
                Err(e) => return Outcome::input_error(e),
            };
            let parsed = match parse_input(&text, "equation") {
                Ok(o) => o,
                Err(e) => return Outcome::input_error(e),
            };
            if matches!(cmd, Command::Solve { .. }) {
                let run = run_solve(&text, parsed, &config);
                emit(&run.report, config.format, run.status)
            } else {
                emit(&run_darboux(&text, &parsed, &config), config.format, Status::Verified)
            }
        }
        Command::Generate { a, d, b, c } => {
            let mut parts = Vec::new();
            for (name, s) in [("A", a), ("D", d), ("B", b), ("C", c)] {
                match parse_polynomial(s) {
                    Ok(p) => parts.push(p),
                    Err(e) => return Outcome::input_error(located(name, s, &e)),
                }
            }
            let comps = InvariantComponents { a: parts[0].clone(), dp: parts[1].clone(), b: parts[2].clone(), c: parts[3].clone() };
            match generate_ode(&comps) {
                Ok(ode) => {
                    let inv = InvariantForm::from_components(&comps);
                    let stdout = format!("y'' = {}\ninvariant: {}\n", ode, render_invariant(&inv));
                    Outcome { stdout, stderr: String::new(), status: Status::Verified }
                }
                Err(e) => Outcome::input_error(e.to_string()),
            }
        }
        Command::Verify { ode, invariant } => {
            let parsed = match parse_input(ode, "equation") {
                Ok(o) => o,
                Err(e) => return Outcome::input_error(e),
            };
            let inv = match parse_invariant(invariant) {
                Ok(i) => i,
                Err(e) => return Outcome::input_error(located("invariant", invariant, &e)),
            };
            match verify_invariant(&parsed, &inv) {
                Verdict::Verified => Outcome { stdout: format!("{VERIFIED}\n"), stderr: String::new(), status: Status::Verified },
                Verdict::Residual(r) => Outcome {
                    stdout: format!("{NOT_VERIFIED}\nresidual: {r}\n"),
                    stderr: String::new(),
                    status: Status::NoSolution,
                },
            }
        }
    }
}

pub fn main_with_args(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::InputError.code() } else { 0 };
        }
    };
    let out = execute(&cli.command);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.status.code()
}
