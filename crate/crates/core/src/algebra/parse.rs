//! Parser for integer polynomials in the variable `t`.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! poly   := sign? term (sign term)*
//! term   := factor ('*'? factor)*
//! factor := atom ('^' digits)?
//! atom   := digits | 't' | '(' poly ')'
//! sign   := '+' | '-'
//! ```
//!
//! Juxtaposition multiplies, so `2t`, `3*t^2` and `(t-1)(t^2-2)` are all
//! accepted; products are expanded.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Ascending integer coefficients, no trailing zeros.
pub type IntCoeffs = Vec<BigInt>;

pub fn parse_int_poly(input: &str) -> Result<IntCoeffs> {
    let chars: Vec<char> = input.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut p = Parser { chars, pos: 0 };
    let out = p.poly()?;
    if p.pos != p.chars.len() {
        return Err(Error::Parse(format!(
            "unexpected '{}' at position {}",
            p.chars[p.pos], p.pos
        )));
    }
    Ok(trim(out))
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn poly(&mut self) -> Result<IntCoeffs> {
        let mut acc: IntCoeffs = Vec::new();
        let mut first = true;
        loop {
            let negate = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    false
                }
                Some('-') => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => break,
            };
            first = false;
            let mut t = self.term()?;
            if negate {
                t.iter_mut().for_each(|c| *c = -c.clone());
            }
            acc = add(&acc, &t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<IntCoeffs> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = mul(&acc, &f);
                }
                Some(c) if c == 't' || c == '(' || c.is_ascii_digit() => {
                    let f = self.factor()?;
                    acc = mul(&acc, &f);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<IntCoeffs> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.digits()?;
            let e: u32 = e
                .try_into()
                .ok()
                .filter(|e: &u32| *e <= 64)
                .ok_or_else(|| Error::Parse("exponent too large".into()))?;
            let mut out = vec![BigInt::one()];
            for _ in 0..e {
                out = mul(&out, &base);
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<IntCoeffs> {
        match self.peek() {
            Some('t') => {
                self.pos += 1;
                Ok(vec![BigInt::zero(), BigInt::one()])
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.poly()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse(format!("expected ')' at position {}", self.pos)));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(vec![self.digits()?]),
            Some(c) => Err(Error::Parse(format!("unexpected '{c}' at position {}", self.pos))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }

    fn digits(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!("expected a number at position {start}")));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse()
            .map_err(|_| Error::Parse(format!("bad integer '{s}'")))
    }
}

fn trim(mut v: IntCoeffs) -> IntCoeffs {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn add(a: &IntCoeffs, b: &IntCoeffs) -> IntCoeffs {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

fn mul(a: &IntCoeffs, b: &IntCoeffs) -> IntCoeffs {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> IntCoeffs {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn parses_expanded_forms() {
        assert_eq!(parse_int_poly("t^3 - t^2 - 2*t + 1").unwrap(), ints(&[1, -2, -1, 1]));
        assert_eq!(parse_int_poly("t^3-t^2-2t+1").unwrap(), ints(&[1, -2, -1, 1]));
        assert_eq!(parse_int_poly("-3t + t^3 - 1").unwrap(), ints(&[-1, -3, 0, 1]));
    }

    #[test]
    fn expands_products() {
        assert_eq!(parse_int_poly("(t-1)(t^2-2)").unwrap(), ints(&[2, -2, -1, 1]));
        assert_eq!(parse_int_poly("(t+1)^3").unwrap(), ints(&[1, 3, 3, 1]));
        assert_eq!(parse_int_poly("2(t+1)").unwrap(), ints(&[2, 2]));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_int_poly("").is_err());
        assert!(parse_int_poly("t^").is_err());
        assert!(parse_int_poly("(t-1").is_err());
        assert!(parse_int_poly("x^3").is_err());
        assert!(parse_int_poly("t^3 +").is_err());
    }
}
