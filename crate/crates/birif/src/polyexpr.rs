//! Textual polynomial expressions: parsing and canonical formatting.
//!
//! Grammar (EBNF):
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor ('*'? factor)*
//! factor := primary ('^' uint)?
//! primary:= number | 'z1' | 'z2' | '(' expr ')'
//! number := decimal | decimal 'i' | 'i'
//! ```
//! Whitespace is insignificant and juxtaposition means multiplication, so
//! `3z1` parses as `3 * z1`.

use num_complex::Complex64;

use crate::bipoly::{BiPoly, DEGREE_CAP};
use crate::error::{Error, Result};

/// Parses a polynomial expression into a [`BiPoly`].
pub fn parse_poly(text: &str) -> Result<BiPoly> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0 };
    p.skip_ws();
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(poly)
}

/// Formats a polynomial so that [`parse_poly`] recovers it exactly.
///
/// Terms are emitted in lexicographic `(i, j)` order; real and imaginary
/// parts use the shortest decimal that round-trips.
pub fn format_poly(p: &BiPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (&(i, j), &c) in p.iter() {
        let (lead, body) = format_coeff(c, i == 0 && j == 0);
        if out.is_empty() {
            if lead < 0.0 {
                out.push('-');
            }
        } else if lead < 0.0 {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&body);
        let mut sep = !body.is_empty();
        if i > 0 {
            if sep {
                out.push('*');
            }
            out.push_str("z1");
            if i > 1 {
                out.push_str(&format!("^{i}"));
            }
            sep = true;
        }
        if j > 0 {
            if sep {
                out.push('*');
            }
            out.push_str("z2");
            if j > 1 {
                out.push_str(&format!("^{j}"));
            }
        }
    }
    out
}

/// Returns the sign to hoist and the magnitude body (possibly empty when the
/// coefficient is a signed unit and a variable follows).
fn format_coeff(c: Complex64, is_constant_term: bool) -> (f64, String) {
    if c.im == 0.0 {
        let mag = c.re.abs();
        if mag == 1.0 && !is_constant_term {
            return (c.re, String::new());
        }
        return (c.re, format!("{mag}"));
    }
    if c.re == 0.0 {
        let mag = c.im.abs();
        if mag == 1.0 {
            return (c.im, "i".to_string());
        }
        return (c.im, format!("{mag}i"));
    }
    // Full complex coefficient: parenthesized, sign carried inside.
    let re = c.re;
    let im = c.im.abs();
    let op = if c.im < 0.0 { '-' } else { '+' };
    let im_body = if im == 1.0 { "i".to_string() } else { format!("{im}i") };
    (1.0, format!("({re} {op} {im_body})"))
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> Error {
        Error::Parse { position: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<BiPoly> {
        self.skip_ws();
        let mut negate = false;
        if let Some(b) = self.peek() {
            if b == b'+' || b == b'-' {
                negate = b == b'-';
                self.pos += 1;
            }
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.scale(Complex64::new(-1.0, 0.0));
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BiPoly> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = self.checked_mul(&acc, &f)?;
                }
                // Juxtaposition: a new factor begins immediately.
                Some(b) if b == b'(' || b == b'z' || b == b'i' || b == b'.' || b.is_ascii_digit() => {
                    let f = self.factor()?;
                    acc = self.checked_mul(&acc, &f)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn checked_mul(&self, a: &BiPoly, b: &BiPoly) -> Result<BiPoly> {
        let prod = a.mul(b);
        let (n1, n2) = prod.declared_bidegree();
        let d = n1.max(n2);
        if d > DEGREE_CAP {
            return Err(Error::DegreeCap { degree: d, cap: DEGREE_CAP });
        }
        Ok(prod)
    }

    fn factor(&mut self) -> Result<BiPoly> {
        let base = self.primary()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.uint()?;
            if e > DEGREE_CAP {
                return Err(Error::DegreeCap { degree: e, cap: DEGREE_CAP });
            }
            let mut acc = BiPoly::constant(Complex64::new(1.0, 0.0));
            for _ in 0..e {
                acc = self.checked_mul(&acc, &base)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<BiPoly> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'z') => {
                if self.bytes[self.pos..].starts_with(b"z1") {
                    self.pos += 2;
                    Ok(BiPoly::from_coeffs([((1, 0), Complex64::new(1.0, 0.0))])?)
                } else if self.bytes[self.pos..].starts_with(b"z2") {
                    self.pos += 2;
                    Ok(BiPoly::from_coeffs([((0, 1), Complex64::new(1.0, 0.0))])?)
                } else {
                    Err(self.error("unknown identifier; expected z1 or z2"))
                }
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(BiPoly::constant(Complex64::new(0.0, 1.0)))
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => {
                let v = self.decimal()?;
                if self.peek() == Some(b'i') {
                    self.pos += 1;
                    Ok(BiPoly::constant(Complex64::new(0.0, v)))
                } else {
                    Ok(BiPoly::constant(Complex64::new(v, 0.0)))
                }
            }
            _ => Err(self.error("expected a number, z1, z2, i, or '('")),
        }
    }

    fn decimal(&mut self) -> Result<f64> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if self.pos == start || (self.pos == start + 1 && self.bytes[start] == b'.') {
            return Err(self.error("expected a decimal number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| self.error("invalid decimal number"))
    }

    fn uint(&mut self) -> Result<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected an unsigned integer exponent"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| self.error("exponent overflow"))
    }
}
