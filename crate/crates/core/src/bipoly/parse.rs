use num_traits::Zero;

use super::{BiPoly, Rational, UniPoly};
use crate::error::{Error, Result};

struct P<'a> {
    s: &'a [u8],
    i: usize,
    proto: BiPoly,
}

pub(super) fn parse_bipoly(text: &str, u: &str, v: &str) -> Result<BiPoly> {
    let mut p = P { s: text.as_bytes(), i: 0, proto: BiPoly::new(u, v, Vec::new()) };
    let e = p.expr()?;
    p.ws();
    if p.i != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

impl P<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { line: 1, col: self.i + 1, msg: msg.into() }
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<BiPoly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.i += 1;
                -self.term()?
            }
            Some(b'+') => {
                self.i += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.i += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<BiPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.i += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(b'/') => {
                    self.i += 1;
                    let d = self.factor()?;
                    let c = match d.rows() {
                        [r] if r.is_constant() && !r.is_zero() => r.coeff(0),
                        _ => return Err(self.err("division by a non-constant")),
                    };
                    acc = acc.scale(&c.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<BiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            self.ws();
            let start = self.i;
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            let k: usize = std::str::from_utf8(&self.s[start..self.i])
                .unwrap()
                .parse()
                .map_err(|_| self.err("expected an exponent"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<BiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.i += 1;
                Ok(-self.factor()?)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
                    self.i += 1;
                }
                let txt = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                let q = parse_decimal(txt).ok_or_else(|| self.err("bad number"))?;
                Ok(self.proto.constant_like(q))
            }
            Some(c) if c.is_ascii_alphabetic() || c >= 0x80 => {
                let start = self.i;
                while self.i < self.s.len()
                    && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_' || self.s[self.i] >= 0x80)
                {
                    self.i += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.i]).map_err(|_| self.err("bad identifier"))?;
                if name == self.proto.u_label() {
                    Ok(self.proto.u_var())
                } else if name == self.proto.v_label() {
                    Ok(self.proto.from_v_poly(UniPoly::x()))
                } else {
                    self.i = start;
                    Err(self.err(&format!("unknown variable '{name}'")))
                }
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

/// Exact decimal conversion: `"0.4"` is `2/5`.
pub fn parse_decimal(txt: &str) -> Option<Rational> {
    let (ip, fp) = match txt.split_once('.') {
        Some((a, b)) => (a, b),
        None => (txt, ""),
    };
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().all(|c| c.is_ascii_digit()) || !fp.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let n: num_bigint::BigInt = if digits.is_empty() { Zero::zero() } else { digits.parse().ok()? };
    let d = num_bigint::BigInt::from(10u32).pow(fp.len() as u32);
    Some(Rational::new(n, d))
}
