//! Deterministic text forms that parse back to the same value.

use num_traits::One;

use crate::integrate::InvariantForm;
use crate::poly::{Polynomial, RationalExpr};

pub fn render_polynomial(p: &Polynomial) -> String {
    p.to_string()
}

/// `num` when the denominator is one, else `(num)/(den)` compactly.
pub fn render_rational(r: &RationalExpr) -> String {
    if r.den().is_one() {
        return render_polynomial(r.num());
    }
    format!("({})/({})", r.num().to_compact_string(), r.den().to_compact_string())
}

/// `A/D + 1/L*ln(B/C)`, omitting the parts that are zero or one.
pub fn render_invariant(inv: &InvariantForm) -> String {
    let abcd = inv.to_abcd();
    let rational = inv.rational_part();
    let mut out = String::new();
    if !rational.is_zero() {
        out.push_str(&render_rational(rational));
    }
    if abcd.b.is_empty() && abcd.c.is_empty() {
        if out.is_empty() {
            out.push('0');
        }
        return out;
    }
    if !out.is_empty() {
        out.push_str(" + ");
    }
    if !abcd.l.is_one() {
        out.push_str(&format!("1/{}*", abcd.l));
    }
    let arg = match (abcd.b.is_empty(), abcd.c.is_empty()) {
        (false, true) if abcd.b.len() == 1 && abcd.b[0].1 == 1 => abcd.b[0].0.to_compact_string(),
        (false, true) => product(&abcd.b),
        (true, false) => format!("1/{}", wrapped(&abcd.c)),
        _ => format!("{}/{}", wrapped(&abcd.b), wrapped(&abcd.c)),
    };
    out.push_str(&format!("ln({arg})"));
    out
}

fn product(factors: &[(Polynomial, u32)]) -> String {
    factors
        .iter()
        .map(|(p, k)| {
            let base = if *k > 1 {
                atom(p)
            } else if p.num_terms() > 1 {
                format!("({})", p.to_compact_string())
            } else {
                p.to_compact_string()
            };
            if *k == 1 { base } else { format!("{base}^{k}") }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn wrapped(factors: &[(Polynomial, u32)]) -> String {
    if factors.len() == 1 && factors[0].1 == 1 {
        atom(&factors[0].0)
    } else if factors.len() == 1 {
        product(factors)
    } else {
        format!("({})", product(factors))
    }
}

fn atom(p: &Polynomial) -> String {
    let s = p.to_compact_string();
    if p.num_terms() == 1 && !s.contains('*') && !s.starts_with('-') {
        s
    } else {
        format!("({s})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse::{parse_invariant, parse_polynomial};

    #[test]
    fn polynomials() {
        assert_eq!(render_polynomial(&Polynomial::zero()), "0");
        assert_eq!(render_polynomial(&parse_polynomial("x-y^3-y").unwrap()), "x - y^3 - y");
    }

    #[test]
    fn invariants() {
        let cases = [
            ("x-1+ln((2*z+3)/(x-y^3-y))", "x + ln((2*z+3)/(x-y^3-y))"),
            ("-x+ln(-c*z^5+d*y^6)-ln(a*z^5+b*x)", "-x + ln((d*y^6-c*z^5)/(b*x+a*z^5))"),
            ("ln(z)", "ln(z)"),
            ("x + ln(x+y-z-1)", "x + ln(x+y-z-1)"),
            ("-ln(x)", "ln(1/x)"),
            ("3", "0"),
            ("y/x - 1/2*ln(x*y+1)", "(y)/(x) + 1/2*ln(1/(x*y+1))"),
            ("ln(x^2*(z+1)^3/y)", "ln(((z+1)^3*x^2)/y)"),
            ("ln((x+y)^2/(z+1))/2", "1/2*ln((x+y)^2/(z+1))"),
        ];
        for (input, want) in cases {
            let inv = parse_invariant(input).unwrap();
            let text = render_invariant(&inv);
            assert_eq!(text, want, "{input}");
            assert_eq!(parse_invariant(&text).unwrap(), inv, "{input}");
        }
    }
}
