//! Parser for the textual scalar syntax used in reports.
//!
//! The grammar accepts what [`Scalar`]'s `Display` emits (and a bit more):
//! sums of products of integers, `q^e` with integer or `(p/d)` exponents,
//! `zetaC^k` monomials, parenthesized subexpressions, and `/` as field
//! division.

use num::{BigInt, BigRational, Rational64};

use super::{Cyclo, Scalar};
use crate::EngineError;

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

pub fn parse_scalar(input: &str) -> Result<Scalar, EngineError> {
    let mut p = Parser { chars: input.chars().collect(), pos: 0, src: input };
    p.skip_ws();
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(p.error("trailing input"));
    }
    Ok(v)
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> EngineError {
        EngineError::Parse { message: format!("{} at byte {} in `{}`", msg, self.pos, self.src) }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Scalar, EngineError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc + t;
                }
                Some('-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc - t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, EngineError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let u = self.unary()?;
                    acc = acc * u;
                }
                Some('/') => {
                    self.pos += 1;
                    let u = self.unary()?;
                    acc = acc.checked_div(&u)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, EngineError> {
        self.skip_ws();
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        let base = self.atom()?;
        self.skip_ws();
        if self.eat('^') {
            let e = self.exponent()?;
            if *e.denom() == 1 {
                let k = *e.numer();
                if k.unsigned_abs() > 1_000 {
                    return Err(self.error("exponent too large"));
                }
                return Ok(base.pow(k as i32));
            }
            // fractional exponent: only meaningful on the bare q
            if base == Scalar::q_pow(Rational64::from_integer(1)) {
                return Ok(Scalar::q_pow(e));
            }
            return Err(self.error("fractional exponent on non-q base"));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Rational64, EngineError> {
        self.skip_ws();
        if self.eat('(') {
            let n = self.signed_int()?;
            self.skip_ws();
            let r = if self.eat('/') {
                let d = self.signed_int()?;
                if d == 0 {
                    return Err(self.error("zero exponent denominator"));
                }
                Rational64::new(n, d)
            } else {
                Rational64::from_integer(n)
            };
            self.skip_ws();
            if !self.eat(')') {
                return Err(self.error("expected `)` in exponent"));
            }
            Ok(r)
        } else {
            Ok(Rational64::from_integer(self.signed_int()?))
        }
    }

    fn signed_int(&mut self) -> Result<i64, EngineError> {
        self.skip_ws();
        let neg = self.eat('-');
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        let v: i64 = s.parse().map_err(|_| self.error("integer overflow"))?;
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<Scalar, EngineError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.skip_ws();
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(v)
            }
            Some('q') => {
                self.pos += 1;
                Ok(Scalar::q_pow(Rational64::from_integer(1)))
            }
            Some('z') => {
                let tag: String = self.chars[self.pos..].iter().take(4).collect();
                if tag != "zeta" {
                    return Err(self.error("unknown symbol"));
                }
                self.pos += 4;
                let c = self.signed_int()?;
                if c < 1 {
                    return Err(self.error("conductor must be positive"));
                }
                Ok(Scalar::from_cyclo(Cyclo::zeta_pow(c as u32, 1)))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                let n = BigInt::parse_bytes(s.as_bytes(), 10).ok_or_else(|| self.error("bad integer"))?;
                Ok(Scalar::from_cyclo(Cyclo::from_rational(BigRational::from(n))))
            }
            _ => Err(self.error("expected atom")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{phase, q_int, q_minus_qinv};
    use proptest::prelude::*;

    fn roundtrip(s: &Scalar) {
        let text = format!("{}", s);
        let back = parse_scalar(&text).unwrap_or_else(|e| panic!("parse {}: {}", text, e));
        assert_eq!(&back, s, "roundtrip of `{}`", text);
    }

    #[test]
    fn roundtrip_basics() {
        roundtrip(&Scalar::zero());
        roundtrip(&Scalar::from_int(-7));
        roundtrip(&q_int(5));
        roundtrip(&(Scalar::from_int(2) / q_int(3)));
        roundtrip(&Scalar::q_pow(Rational64::new(-3, 2)));
        roundtrip(&(phase(Rational64::new(5, 16)) * Scalar::q_pow(Rational64::new(1, 2))));
        roundtrip(&(phase(Rational64::new(1, 3)) + Scalar::from_int(1)));
    }

    #[test]
    fn parse_freeform() {
        let v = parse_scalar("2/(q + q^-1)").unwrap();
        assert_eq!(v * q_int(2), Scalar::from_int(2));
        let w = parse_scalar("(q - q^-1) * (q + q^-1)").unwrap();
        assert_eq!(w, q_minus_qinv() * q_int(2));
        assert!(parse_scalar("1 +").is_err());
        assert!(parse_scalar("zeta0").is_err());
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        let term = (-9i64..10, -4i64..5, 1i64..4, 0i64..6, 1u32..3).prop_map(
            |(c, e_num, e_den, zk, zc)| {
                let conductor = 4 * zc;
                Scalar::from_int(c)
                    * Scalar::q_pow(Rational64::new(e_num, e_den))
                    * Scalar::from_cyclo(Cyclo::zeta_pow(conductor, zk))
            },
        );
        prop::collection::vec(term, 1..4).prop_map(|ts| {
            let num = ts.iter().fold(Scalar::zero(), |a, b| a + b.clone());
            num / (q_int(2) + Scalar::from_int(3))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn roundtrip_random(s in arb_scalar()) {
            let text = format!("{}", s);
            let back = parse_scalar(&text).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
