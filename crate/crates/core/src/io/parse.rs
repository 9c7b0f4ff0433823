//! Recursive descent parser for rational expressions, ODE right-hand sides and
//! first integrals.
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = ("+" | "-") unary | power ;
//! power    = atom [ "^" exponent ] ;
//! exponent = ["-"] integer | "(" ["-"] integer [ "/" integer ] ")" ;
//! atom     = number | identifier | ("ln" | "log" | "sqrt") "(" expr ")" | "(" expr ")" ;
//! number   = integer [ "/" integer ] ;
//! ```
//!
//! An integer literal followed by `/` and another integer literal is read as
//! one rational literal, so `x/2/3` is `x/(2/3)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::integrate::InvariantForm;
use crate::ode::Ode2;
use crate::poly::{Coeff, Polynomial, RationalExpr, Symbol};

const MAX_EXPONENT: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    /// Zero-based character offset into the input.
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("fractional exponent is not allowed here")]
    FractionalExponent,
    #[error("exponent larger than {MAX_EXPONENT}")]
    ExponentTooLarge,
    #[error("`{0}` is not allowed in a rational expression")]
    NotRational(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("expression is not a polynomial")]
    NotPolynomial,
    #[error("expression is not of the form rational + sum of c*ln(...)")]
    NotLogLinear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Ln,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Num(Coeff),
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Coeff),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

impl Lexer {
    fn new(text: &str) -> Result<Lexer, ParseError> {
        let chars: Vec<char> = text.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                toks.push((Tok::Int(s.parse().unwrap()), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), start));
            } else if "+-*/^()".contains(c) {
                toks.push((Tok::Op(c), i));
                i += 1;
            } else {
                return Err(ParseError { position: i, kind: ParseErrorKind::UnexpectedChar(c) });
            }
        }
        toks.push((Tok::End, chars.len()));
        Ok(Lexer { toks })
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &'static str) -> ParseError {
        let kind = match self.peek() {
            Tok::End => ParseErrorKind::UnexpectedEnd,
            _ => ParseErrorKind::Expected(expected),
        };
        ParseError { position: self.pos(), kind }
    }

    fn eat(&mut self, op: char) -> bool {
        if *self.peek() == Tok::Op(op) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char, what: &'static str) -> Result<(), ParseError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let pos = self.pos();
            let kind = if self.eat('+') {
                ExprKind::Add(Box::new(lhs), Box::new(self.term()?))
            } else if self.eat('-') {
                ExprKind::Sub(Box::new(lhs), Box::new(self.term()?))
            } else {
                return Ok(lhs);
            };
            lhs = Expr { kind, pos };
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            let kind = if self.eat('*') {
                ExprKind::Mul(Box::new(lhs), Box::new(self.unary()?))
            } else if self.eat('/') {
                ExprKind::Div(Box::new(lhs), Box::new(self.unary()?))
            } else {
                return Ok(lhs);
            };
            lhs = Expr { kind, pos };
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), pos });
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        let pos = self.pos();
        if !self.eat('^') {
            return Ok(base);
        }
        let e = self.exponent()?;
        Ok(Expr { kind: ExprKind::Pow(Box::new(base), e), pos })
    }

    fn exponent(&mut self) -> Result<Coeff, ParseError> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let mut e = Coeff::from(self.integer()?);
        if paren {
            if self.eat('/') {
                let pos = self.pos();
                let d = self.integer()?;
                if d.is_zero() {
                    return Err(ParseError { position: pos, kind: ParseErrorKind::DivisionByZero });
                }
                e /= Coeff::from(d);
            }
            self.expect(')', "`)`")?;
        }
        Ok(if neg { -e } else { e })
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.error("integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                let fused = *self.peek() == Tok::Op('/')
                    && matches!(self.peek_at(1), Tok::Int(_))
                    && *self.peek_at(2) != Tok::Op('^');
                let mut value = Coeff::from(n);
                if fused {
                    let slash = self.pos();
                    self.bump();
                    let Tok::Int(d) = self.bump().0 else { unreachable!() };
                    if d.is_zero() {
                        return Err(ParseError { position: slash, kind: ParseErrorKind::DivisionByZero });
                    }
                    value /= Coeff::from(d);
                }
                Ok(Expr { kind: ExprKind::Num(value), pos })
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() != Tok::Op('(') {
                    return Ok(Expr { kind: ExprKind::Sym(name), pos });
                }
                let func = match name.as_str() {
                    "ln" | "log" => Func::Ln,
                    "sqrt" => Func::Sqrt,
                    _ => return Err(ParseError { position: pos, kind: ParseErrorKind::UnknownFunction(name) }),
                };
                self.bump();
                let arg = self.expr()?;
                self.expect(')', "`)`")?;
                Ok(Expr { kind: ExprKind::Call(func, Box::new(arg)), pos })
            }
            Tok::Op('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')', "`)`")?;
                Ok(e)
            }
            _ => Err(self.error("a number, identifier or `(`")),
        }
    }
}

/// Parses `text` into an expression tree.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::new(text)?.toks;
    let mut p = Parser { toks, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        let kind = match p.peek() {
            Tok::Op(c) => ParseErrorKind::UnexpectedChar(*c),
            _ => ParseErrorKind::Expected("an operator"),
        };
        return Err(ParseError { position: p.pos(), kind });
    }
    Ok(e)
}

fn err(pos: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { position: pos, kind }
}

fn integer_exponent(e: &Coeff, pos: usize) -> Result<i32, ParseError> {
    if !e.is_integer() {
        return Err(err(pos, ParseErrorKind::FractionalExponent));
    }
    match e.to_integer().to_i64() {
        Some(k) if k.unsigned_abs() <= MAX_EXPONENT as u64 => Ok(k as i32),
        _ => Err(err(pos, ParseErrorKind::ExponentTooLarge)),
    }
}

impl Expr {
    /// Evaluates a tree without `ln` or `sqrt` to a reduced rational function.
    pub fn to_rational(&self) -> Result<RationalExpr, ParseError> {
        let pos = self.pos;
        Ok(match &self.kind {
            ExprKind::Num(c) => RationalExpr::from_poly(Polynomial::constant(c.clone())),
            ExprKind::Sym(s) => RationalExpr::from_poly(Polynomial::var(Symbol::new(s))),
            ExprKind::Neg(a) => a.to_rational()?.neg(),
            ExprKind::Add(a, b) => a.to_rational()?.add(&b.to_rational()?),
            ExprKind::Sub(a, b) => a.to_rational()?.sub(&b.to_rational()?),
            ExprKind::Mul(a, b) => a.to_rational()?.mul(&b.to_rational()?),
            ExprKind::Div(a, b) => a
                .to_rational()?
                .div(&b.to_rational()?)
                .map_err(|_| err(pos, ParseErrorKind::DivisionByZero))?,
            ExprKind::Pow(a, e) => {
                let k = integer_exponent(e, pos)?;
                a.to_rational()?.pow(k).map_err(|_| err(pos, ParseErrorKind::DivisionByZero))?
            }
            ExprKind::Call(f, _) => return Err(err(pos, ParseErrorKind::NotRational(f.name()))),
        })
    }

    /// Splits into `rational + sum c_k ln(u_k)` with `u_k` polynomials.
    fn log_linear(&self) -> Result<(RationalExpr, Vec<(Coeff, Polynomial)>), ParseError> {
        let pos = self.pos;
        match &self.kind {
            ExprKind::Call(Func::Ln, arg) => {
                let mut logs = Vec::new();
                arg.log_factors(&Coeff::one(), &mut logs)?;
                Ok((RationalExpr::zero(), logs))
            }
            ExprKind::Call(Func::Sqrt, _) => Err(err(pos, ParseErrorKind::NotLogLinear)),
            ExprKind::Neg(a) => {
                let (r, l) = a.log_linear()?;
                Ok((r.neg(), l.into_iter().map(|(c, u)| (-c, u)).collect()))
            }
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
                let (ra, mut la) = a.log_linear()?;
                let (rb, lb) = b.log_linear()?;
                if matches!(self.kind, ExprKind::Add(..)) {
                    la.extend(lb);
                    Ok((ra.add(&rb), la))
                } else {
                    la.extend(lb.into_iter().map(|(c, u)| (-c, u)));
                    Ok((ra.sub(&rb), la))
                }
            }
            ExprKind::Mul(a, b) => {
                let (ra, la) = a.log_linear()?;
                let (rb, lb) = b.log_linear()?;
                match (la.is_empty(), lb.is_empty()) {
                    (true, true) => Ok((ra.mul(&rb), Vec::new())),
                    (true, false) => scale_logs(&ra, rb, lb, pos),
                    (false, true) => scale_logs(&rb, ra, la, pos),
                    (false, false) => Err(err(pos, ParseErrorKind::NotLogLinear)),
                }
            }
            ExprKind::Div(a, b) => {
                let (ra, la) = a.log_linear()?;
                let rb = b.to_rational().map_err(|e| match e.kind {
                    ParseErrorKind::NotRational(_) => err(pos, ParseErrorKind::NotLogLinear),
                    _ => e,
                })?;
                let inv = RationalExpr::one()
                    .div(&rb)
                    .map_err(|_| err(pos, ParseErrorKind::DivisionByZero))?;
                if la.is_empty() {
                    Ok((ra.mul(&inv), la))
                } else {
                    scale_logs(&inv, ra, la, pos)
                }
            }
            ExprKind::Pow(..) | ExprKind::Num(_) | ExprKind::Sym(_) => {
                if self.contains_call() {
                    return Err(err(pos, ParseErrorKind::NotLogLinear));
                }
                Ok((self.to_rational()?, Vec::new()))
            }
        }
    }

    /// Appends the polynomial factors of a logarithm's argument, each with
    /// its exponent times `scale`. Constant factors are dropped.
    fn log_factors(&self, scale: &Coeff, out: &mut Vec<(Coeff, Polynomial)>) -> Result<(), ParseError> {
        match &self.kind {
            ExprKind::Mul(a, b) => {
                a.log_factors(scale, out)?;
                b.log_factors(scale, out)
            }
            ExprKind::Div(a, b) => {
                a.log_factors(scale, out)?;
                b.log_factors(&-scale, out)
            }
            ExprKind::Neg(a) => a.log_factors(scale, out),
            ExprKind::Pow(a, e) => {
                if e.abs() > Coeff::from(BigInt::from(MAX_EXPONENT)) {
                    return Err(err(self.pos, ParseErrorKind::ExponentTooLarge));
                }
                a.log_factors(&(scale * e), out)
            }
            ExprKind::Call(Func::Sqrt, a) => a.log_factors(&(scale / Coeff::from(BigInt::from(2))), out),
            ExprKind::Call(Func::Ln, _) => Err(err(self.pos, ParseErrorKind::NotLogLinear)),
            _ => {
                let r = self.to_rational()?;
                if r.is_zero() {
                    return Err(err(self.pos, ParseErrorKind::DivisionByZero));
                }
                let (n, d) = r.into_parts();
                out.push((scale.clone(), n));
                out.push((-scale, d));
                Ok(())
            }
        }
    }

    fn contains_call(&self) -> bool {
        match &self.kind {
            ExprKind::Call(..) => true,
            ExprKind::Num(_) | ExprKind::Sym(_) => false,
            ExprKind::Neg(a) | ExprKind::Pow(a, _) => a.contains_call(),
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) | ExprKind::Div(a, b) => {
                a.contains_call() || b.contains_call()
            }
        }
    }
}

/// `factor * (rational + logs)` where `factor` must be a numeric constant
/// for the log part to stay linear.
fn scale_logs(
    factor: &RationalExpr,
    rational: RationalExpr,
    logs: Vec<(Coeff, Polynomial)>,
    pos: usize,
) -> Result<(RationalExpr, Vec<(Coeff, Polynomial)>), ParseError> {
    let c = match (factor.num().constant_value(), factor.den().constant_value()) {
        (Some(n), Some(d)) => n / d,
        _ => return Err(err(pos, ParseErrorKind::NotLogLinear)),
    };
    Ok((rational.scale(&c), logs.into_iter().map(|(k, u)| (k * &c, u)).collect()))
}

pub fn parse_rational(text: &str) -> Result<RationalExpr, ParseError> {
    parse_expr(text)?.to_rational()
}

pub fn parse_polynomial(text: &str) -> Result<Polynomial, ParseError> {
    let r = parse_rational(text)?;
    match r.den().constant_value() {
        Some(d) => Ok(r.num().scale(&d.recip())),
        None => Err(err(0, ParseErrorKind::NotPolynomial)),
    }
}

/// Parses the right-hand side `phi` of `y'' = phi(x, y, z)`.
pub fn parse_ode(text: &str) -> Result<Ode2, ParseError> {
    Ok(Ode2::from_rational(&parse_rational(text)?))
}

/// Parses a first integral of the form `rational + sum c_k ln(...)`.
pub fn parse_invariant(text: &str) -> Result<InvariantForm, ParseError> {
    let (rational, logs) = parse_expr(text)?.log_linear()?;
    Ok(InvariantForm::new(rational, logs))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Num(c) => write!(f, "{}", crate::poly::fmt_coeff(c)),
            ExprKind::Sym(s) => f.write_str(s),
            ExprKind::Neg(a) => write!(f, "-({a})"),
            ExprKind::Add(a, b) => write!(f, "({a} + {b})"),
            ExprKind::Sub(a, b) => write!(f, "({a} - {b})"),
            ExprKind::Mul(a, b) => write!(f, "({a})*({b})"),
            ExprKind::Div(a, b) => write!(f, "({a})/({b})"),
            ExprKind::Pow(a, e) => write!(f, "({a})^({})", crate::poly::fmt_coeff(e)),
            ExprKind::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
