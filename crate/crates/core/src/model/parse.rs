//! Recursive-descent parser for coefficient expressions.
//!
//! Grammar: `t`, numbers, `pi`, `+ - * / ^`, parentheses and the functions
//! `sin`, `cos`, `exp`. Exponents must reduce to constants.

use super::TimeFunction;
use crate::error::{Error, Result};

pub fn parse_expr(src: &str) -> Result<TimeFunction> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<TimeFunction> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<TimeFunction> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.eat(b'/') {
                acc = acc / self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<TimeFunction> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<TimeFunction> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let at = self.pos;
            let exponent = self.unary()?;
            let p = exponent
                .as_constant()
                .ok_or(Error::Parse { pos: at, msg: "exponent must be constant".into() })?;
            return Ok(base.powf(p));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<TimeFunction> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match name {
                    "t" => Ok(TimeFunction::t()),
                    "pi" => Ok(TimeFunction::constant(std::f64::consts::PI)),
                    "sin" | "cos" | "exp" => {
                        if !self.eat(b'(') {
                            return Err(self.err("expected '(' after function name"));
                        }
                        let arg = self.expr()?;
                        if !self.eat(b')') {
                            return Err(self.err("expected ')'"));
                        }
                        Ok(match name {
                            "sin" => arg.sin(),
                            "cos" => arg.cos(),
                            _ => arg.exp(),
                        })
                    }
                    _ => Err(Error::Parse { pos: start, msg: format!("unknown identifier '{name}'") }),
                }
            }
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<TimeFunction> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        digits(&mut self.pos);
        if self.pos < s.len() && s[self.pos] == b'.' {
            self.pos += 1;
            digits(&mut self.pos);
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let mut p = self.pos + 1;
            if p < s.len() && (s[p] == b'+' || s[p] == b'-') {
                p += 1;
            }
            if p < s.len() && s[p].is_ascii_digit() {
                digits(&mut p);
                self.pos = p;
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).unwrap_or("");
        text.parse::<f64>()
            .map(TimeFunction::constant)
            .map_err(|_| Error::Parse { pos: start, msg: format!("bad number '{text}'") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, t: f64) -> f64 {
        parse_expr(src).unwrap().eval(t)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1 + 2*3", 0.0), 7.0);
        assert_eq!(eval("2^3^2", 0.0), 512.0);
        assert_eq!(eval("-t^2", 3.0), -9.0);
        assert_eq!(eval("8/2/2", 0.0), 2.0);
        assert_eq!(eval("(1+t)*(1-t)", 2.0), -3.0);
        assert!((eval("1.5e-1 * sin(t) + exp(0)", 0.5) - (0.15 * 0.5f64.sin() + 1.0)).abs() < 1e-15);
        assert!((eval("cos(pi)", 0.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_positions() {
        for bad in ["", "1 +", "sin t", "foo(t)", "t^t", "(1", "1 2", "3 $"] {
            let e = parse_expr(bad).unwrap_err();
            assert!(e.is_parse(), "{bad}: {e}");
        }
        match parse_expr("1 + foo").unwrap_err() {
            Error::Parse { pos, .. } => assert_eq!(pos, 4),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn parsed_derivative() {
        let f = parse_expr("sin(2*t)^2").unwrap();
        let t: f64 = 0.3;
        let want = 2.0 * (2.0 * t).sin() * (2.0 * t).cos() * 2.0;
        assert!((f.derivative().eval(t) - want).abs() < 1e-14);
    }
}
