//! Canonical text format for polynomials.
//!
//! A polynomial is `0` or a sequence of terms in descending graded-lex
//! order, each written `<sign><num>[/<den>]` followed by the variables in
//! alphabet order as `name` or `name^e` (`e >= 2`), all separated by single
//! spaces.  Example: `+3/2 r13^2 r23 -1 h +7`.  The parser accepts exactly
//! what the printer produces, so printing is injective and round-trips.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::sparse::{Rational, SparsePoly};
use super::var::VarId;
use super::PolyError;

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let sign = if c.is_negative() { '-' } else { '+' };
            write!(f, "{sign}{}", c.numer().abs())?;
            if !c.denom().is_one() {
                write!(f, "/{}", c.denom())?;
            }
            if !m.is_one() {
                write!(f, " {m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_err(msg: impl Into<String>) -> PolyError {
    PolyError::Parse(msg.into())
}

fn parse_natural(s: &str) -> Result<BigInt, PolyError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return Err(parse_err(format!("malformed integer `{s}`")));
    }
    s.parse::<BigInt>().map_err(|e| parse_err(e.to_string()))
}

fn parse_coefficient(tok: &str) -> Result<Rational, PolyError> {
    let (neg, body) = match tok.as_bytes()[0] {
        b'+' => (false, &tok[1..]),
        b'-' => (true, &tok[1..]),
        _ => return Err(parse_err(format!("term must start with a sign: `{tok}`"))),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => {
            let d = parse_natural(d)?;
            if d <= BigInt::one() {
                return Err(parse_err(format!("denominator must exceed 1: `{tok}`")));
            }
            (parse_natural(n)?, d)
        }
        None => (parse_natural(body)?, BigInt::one()),
    };
    if num.is_zero() {
        return Err(parse_err("zero coefficient"));
    }
    let c = Rational::new(num.clone(), den.clone());
    if c.numer() != &num || c.denom() != &den {
        return Err(parse_err(format!("coefficient not in lowest terms: `{tok}`")));
    }
    Ok(if neg { -c } else { c })
}

fn parse_power(tok: &str) -> Result<(VarId, u16), PolyError> {
    let (name, e) = match tok.split_once('^') {
        Some((n, e)) => {
            let e: u16 = parse_natural(e)?
                .try_into()
                .map_err(|_| parse_err(format!("exponent too large: `{tok}`")))?;
            if e < 2 {
                return Err(parse_err(format!("exponent must be at least 2: `{tok}`")));
            }
            (n, e)
        }
        None => (tok, 1),
    };
    let v = VarId::parse(name).ok_or_else(|| parse_err(format!("unknown variable `{name}`")))?;
    Ok((v, e))
}

impl FromStr for SparsePoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<SparsePoly, PolyError> {
        parse(s, true)
    }
}

impl SparsePoly {
    /// Like `parse`, but accepts terms in any order and repeated monomials.
    pub fn parse_lenient(s: &str) -> Result<SparsePoly, PolyError> {
        parse(s, false)
    }
}

fn parse(s: &str, strict: bool) -> Result<SparsePoly, PolyError> {
    {
        if s == "0" {
            return Ok(SparsePoly::zero());
        }
        if s.is_empty() {
            return Err(parse_err("empty input"));
        }
        let mut terms: Vec<(Monomial, Rational)> = Vec::new();
        let mut current: Option<(Rational, Vec<(VarId, u16)>)> = None;
        let finish = |cur: (Rational, Vec<(VarId, u16)>), terms: &mut Vec<(Monomial, Rational)>| {
            let m = Monomial::from_pairs(&cur.1);
            if let Some((prev, _)) = terms.last() {
                if strict && *prev <= m {
                    return Err(parse_err(format!("terms out of order at `{m}`")));
                }
            }
            terms.push((m, cur.0));
            Ok(())
        };
        for tok in s.split(' ') {
            if tok.is_empty() {
                return Err(parse_err("consecutive or trailing spaces"));
            }
            if tok.starts_with('+') || tok.starts_with('-') {
                if let Some(cur) = current.take() {
                    finish(cur, &mut terms)?;
                }
                current = Some((parse_coefficient(tok)?, Vec::new()));
            } else {
                let cur = current
                    .as_mut()
                    .ok_or_else(|| parse_err("variable before first coefficient"))?;
                let (v, e) = parse_power(tok)?;
                if cur.1.last().is_some_and(|(last, _)| *last >= v) {
                    return Err(parse_err(format!("variables out of alphabet order at `{tok}`")));
                }
                cur.1.push((v, e));
            }
        }
        if let Some(cur) = current.take() {
            finish(cur, &mut terms)?;
        }
        if strict {
            Ok(SparsePoly::from_sorted(terms))
        } else {
            Ok(SparsePoly::from_terms(terms))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_canonically() {
        let p: SparsePoly = "+3/2 r13^2 r23 -1 h +7".parse().unwrap();
        assert_eq!(p.to_string(), "+3/2 r13^2 r23 -1 h +7");
        assert_eq!(SparsePoly::zero().to_string(), "0");
    }

    #[test]
    fn lenient_parse_reorders() {
        let p = SparsePoly::parse_lenient("+3 r13 +1 r23^3 +1 r13").unwrap();
        assert_eq!(p.to_string(), "+1 r23^3 +4 r13");
    }

    #[test]
    fn rejects_noncanonical_input() {
        for bad in [
            "", "3 r13", "+1 r23 r13", "+1 r13 +1 r13^2", "+2/4 r13", "+1 r13^1", "+0", "+1 zz",
            "+1  r13", "+1/1", "+01 r13", "+1 r13 ",
        ] {
            assert!(bad.parse::<SparsePoly>().is_err(), "accepted `{bad}`");
        }
    }
}
