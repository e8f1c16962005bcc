//! Textual scalar grammar.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' ['+' | '-'] integer)?
//! atom  := integer | 't' | 'pi' | 's' | 'g' | '(' expr ')'
//! ```
//!
//! `t` is the Laurent variable, `pi` the uniformiser of either kind, `s` the configured
//! square root and `g` the generator of `F_q` for `f > 1`. Whitespace is ignored and the
//! Unicode minus sign is accepted.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{Base, Field, FieldKind, ResidueField, Scalar};
use crate::error::{Error, Result};

struct Parser<'a> {
    field: &'a Field,
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

fn err(column: usize, message: impl Into<String>) -> Error {
    Error::Parse { column, message: message.into() }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn column(&self) -> usize {
        self.chars.get(self.pos).map(|&(c, _)| c).unwrap_or(self.len + 1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Scalar> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = self.field.add(&acc, &self.term()?);
            } else if self.eat('-') {
                acc = self.field.sub(&acc, &self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = self.field.mul(&acc, &self.unary()?);
            } else if self.peek() == Some('/') {
                let col = self.column();
                self.pos += 1;
                let rhs = self.unary()?;
                acc = self.field.div(&acc, &rhs).map_err(|_| err(col, "division by zero"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar> {
        if self.eat('-') {
            return Ok(self.field.neg(&self.unary()?));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn integer(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        s.parse().ok()
    }

    fn power(&mut self) -> Result<Scalar> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let col = self.column();
        let negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let e = self.integer().ok_or_else(|| err(col, "expected integer exponent"))?;
        let e: u64 = e.try_into().map_err(|_| err(col, "exponent too large"))?;
        let r = self.field.pow(&base, e);
        if negative {
            self.field.inv(&r).map_err(|_| err(col, "zero raised to a negative power"))
        } else {
            Ok(r)
        }
    }

    fn atom(&mut self) -> Result<Scalar> {
        let col = self.column();
        let k = self.field;
        match self.peek() {
            None => Err(err(col, "unexpected end of input")),
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer().unwrap();
                Ok(k.from_base(big_to_base(k, &n)))
            }
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(err(self.column(), "expected ')'"));
                }
                Ok(v)
            }
            Some('p') => {
                self.pos += 1;
                if !self.eat('i') {
                    return Err(err(col, "unknown identifier (expected 'pi')"));
                }
                Ok(k.pi_pow(1))
            }
            Some('t') => {
                self.pos += 1;
                if k.kind() != FieldKind::Laurent {
                    return Err(err(col, "'t' is only defined for Laurent fields; use 'pi'"));
                }
                Ok(k.pi_pow(1))
            }
            Some('s') => {
                self.pos += 1;
                k.sqrt_d().map_err(|_| err(col, "'s' used but the field has no extension"))
            }
            Some('g') => {
                self.pos += 1;
                if k.kind() != FieldKind::Laurent || k.residue_field().f() == 1 {
                    return Err(err(col, "'g' needs a residue field with f > 1"));
                }
                let g = k.residue_field().generator();
                Ok(k.from_base(k.base_digit(g)))
            }
            Some(c) => Err(err(col, format!("unexpected character '{c}'"))),
        }
    }
}

fn big_to_base(k: &Field, n: &BigInt) -> Base {
    match k.kind() {
        FieldKind::Padic => Base::Q(BigRational::from_integer(n.clone())),
        FieldKind::Laurent => {
            let p = BigInt::from(k.p());
            let r: u32 = ((n % &p + &p) % &p).try_into().unwrap();
            k.base_digit(r)
        }
    }
}

pub(super) fn parse_scalar(field: &Field, text: &str) -> Result<Scalar> {
    let chars: Vec<(usize, char)> = text
        .chars()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(i, c)| (i + 1, if c == '\u{2212}' { '-' } else { c }))
        .collect();
    let mut parser = Parser { field, chars, pos: 0, len: text.chars().count() };
    if parser.peek().is_none() {
        return Err(err(1, "empty scalar"));
    }
    let v = parser.expr()?;
    if parser.pos != parser.chars.len() {
        return Err(err(parser.column(), "trailing input"));
    }
    Ok(v)
}

fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn coeff_times(c: &str, mono: &str) -> String {
    match (c, mono) {
        (c, "") => c.to_string(),
        ("1", m) => m.to_string(),
        (c, m) => format!("{c}*{m}"),
    }
}

fn format_poly_terms(k: &ResidueField, coeffs: &[u32], shift: i64) -> Vec<String> {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| {
            let e = i as i64 - shift;
            let mono = match e {
                0 => String::new(),
                1 => "t".to_string(),
                e => format!("t^{e}"),
            };
            coeff_times(&k.format(c), &mono)
        })
        .collect()
}

/// Display form of a base element, re-parseable by [`parse_scalar`].
pub(crate) fn format_base_plain(a: &Base, k: &ResidueField) -> String {
    match a {
        Base::Q(r) => format_rational(r),
        Base::F(r) => {
            if r.is_zero() {
                return "0".into();
            }
            if let Some(shift) = r.laurent_shift() {
                return format_poly_terms(k, &r.num, shift as i64).join(" + ");
            }
            let num = format_poly_terms(k, &r.num, 0).join(" + ");
            let den = format_poly_terms(k, &r.den, 0).join(" + ");
            format!("({num})/({den})")
        }
    }
}

fn needs_parens(s: &str) -> bool {
    s.contains(' ') || s.contains('/')
}

pub(super) fn format_scalar(field: &Field, a: &Scalar) -> String {
    let k = field.residue_field();
    let x = format_base_plain(&a.x, k);
    if field.base_is_zero(&a.y) {
        return x;
    }
    let y = match &a.y {
        Base::Q(r) if r.is_negative() => {
            let s = format_rational(&-r);
            let s = if needs_parens(&s) { format!("({s})") } else { s };
            let part = coeff_times(&s, "s");
            return if field.base_is_zero(&a.x) {
                format!("-{part}")
            } else {
                format!("{x} - {part}")
            };
        }
        other => format_base_plain(other, k),
    };
    let y = if needs_parens(&y) { format!("({y})") } else { y };
    let part = coeff_times(&y, "s");
    if field.base_is_zero(&a.x) {
        part
    } else {
        format!("{x} + {part}")
    }
}

#[cfg(test)]
mod tests {
    use super::super::FieldConfig;
    use super::*;

    #[test]
    fn rationals_and_columns() {
        let k = Field::new(FieldConfig::padic(5)).unwrap();
        let v = k.parse_scalar("\u{2212}3/7").unwrap();
        assert_eq!(k.format_scalar(&v), "-3/7");
        assert_eq!(k.parse_scalar(" 2 * pi ^ -1 ").unwrap(), k.rational(2, 5).unwrap());
        match k.parse_scalar("1 + t") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(k.parse_scalar("1/0"), Err(Error::Parse { column: 2, .. })));
        assert!(matches!(k.parse_scalar("(1"), Err(Error::Parse { .. })));
        assert!(matches!(k.parse_scalar(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn laurent_terms_round_trip() {
        let k = Field::new(FieldConfig::laurent(5, 1)).unwrap();
        let v = k.parse_scalar("2*t^-1 + 1 + t^2").unwrap();
        assert_eq!(k.valuation(&v), Some(-1));
        let printed = k.format_scalar(&v);
        assert_eq!(printed, "2*t^-1 + 1 + t^2");
        assert_eq!(k.parse_scalar(&printed).unwrap(), v);
        let r = k.parse_scalar("1/(1 + t)").unwrap();
        assert_eq!(k.parse_scalar(&k.format_scalar(&r)).unwrap(), r);
        assert_eq!(k.parse_scalar("7").unwrap(), k.int(2));
    }

    #[test]
    fn quadratic_round_trip() {
        let base = Field::new(FieldConfig::padic(7)).unwrap();
        let k = Field::new(FieldConfig::padic(7).with_ext(base.int(2).x, 3)).unwrap();
        for text in ["1/2 + 3/4*s", "-s", "5 - 2*s", "(1 + s)/2"] {
            let v = k.parse_scalar(text).unwrap();
            assert_eq!(k.parse_scalar(&k.format_scalar(&v)).unwrap(), v, "{text}");
        }
        assert_eq!(k.format_scalar(&k.parse_scalar("1 - s").unwrap()), "1 - s");
        assert!(base.parse_scalar("s").is_err());
    }

    #[test]
    fn residue_generator() {
        let k = Field::new(FieldConfig::laurent(3, 2)).unwrap();
        let v = k.parse_scalar("(g + 1)*t").unwrap();
        assert_eq!(k.parse_scalar(&k.format_scalar(&v)).unwrap(), v);
    }
}
