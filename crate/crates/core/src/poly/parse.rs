//! Text parser for integer polynomials.
//!
//! ```text
//! poly    := ws term (ws ('+'|'-') ws term)* ws
//! term    := [integer] ( '*'? var ('^' nat)? )+  |  integer
//! var     := letter (letter|digit)*
//! integer := ['-'] digit+ ;  nat := digit+
//! ```
//!
//! Whitespace is allowed between any two tokens.

use num_bigint::BigInt;
use num_traits::One;

use super::{ExpVec, PolyError, SparsePoly};

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn err(&self, message: impl Into<String>) -> PolyError {
        PolyError::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn ident(&mut self) -> Option<(usize, &'a str)> {
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            return None;
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        Some((
            start,
            std::str::from_utf8(&self.src[start..self.pos]).unwrap(),
        ))
    }
}

struct RawTerm {
    coeff: BigInt,
    factors: Vec<(usize, String, u32)>,
}

/// Parses `text` into a polynomial.
///
/// Variables follow `var_order` when given (any other identifier is an
/// error), otherwise their order of first appearance.
pub fn parse_poly(text: &str, var_order: Option<&[String]>) -> Result<SparsePoly, PolyError> {
    if text.trim().is_empty() {
        return Err(PolyError::EmptyInput);
    }
    let mut cur = Cursor {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut raw = Vec::new();

    cur.skip_ws();
    raw.push(parse_term(&mut cur, false)?);
    loop {
        cur.skip_ws();
        let negate = match cur.peek() {
            None => break,
            Some(b'+') => false,
            Some(b'-') => true,
            Some(_) => return Err(cur.err("expected '+' or '-'")),
        };
        cur.pos += 1;
        cur.skip_ws();
        raw.push(parse_term(&mut cur, negate)?);
    }

    let mut vars: Vec<String> = var_order.map(|v| v.to_vec()).unwrap_or_default();
    if var_order.is_some() {
        for t in &raw {
            for (offset, name, _) in &t.factors {
                if !vars.contains(name) {
                    return Err(PolyError::UnknownVariable {
                        name: name.clone(),
                        offset: *offset,
                    });
                }
            }
        }
    } else {
        for t in &raw {
            for (_, name, _) in &t.factors {
                if !vars.contains(name) {
                    vars.push(name.clone());
                }
            }
        }
    }

    let n = vars.len();
    let terms = raw.into_iter().map(|t| {
        let mut e = vec![0u32; n];
        for (_, name, k) in t.factors {
            let i = vars.iter().position(|v| *v == name).unwrap();
            e[i] += k;
        }
        (ExpVec::new(e), t.coeff)
    });
    Ok(SparsePoly::from_terms(vars.clone(), terms))
}

fn parse_integer(cur: &mut Cursor<'_>) -> Result<Option<BigInt>, PolyError> {
    let start = cur.pos;
    let neg = cur.peek() == Some(b'-');
    if neg {
        cur.pos += 1;
        cur.skip_ws();
    }
    match cur.digits() {
        Some(d) => {
            let v: BigInt = d.parse().unwrap();
            Ok(Some(if neg { -v } else { v }))
        }
        None if neg => Err(cur.err("expected digits after '-'")),
        None => {
            cur.pos = start;
            Ok(None)
        }
    }
}

fn parse_term(cur: &mut Cursor<'_>, negate: bool) -> Result<RawTerm, PolyError> {
    let coeff = parse_integer(cur)?;
    let mut factors = Vec::new();
    loop {
        let save = cur.pos;
        cur.skip_ws();
        let had_star = cur.peek() == Some(b'*');
        if had_star {
            cur.pos += 1;
            cur.skip_ws();
        }
        match cur.ident() {
            Some((offset, name)) => {
                let mut exp = 1u32;
                let after_var = cur.pos;
                cur.skip_ws();
                if cur.peek() == Some(b'^') {
                    cur.pos += 1;
                    cur.skip_ws();
                    let d = cur
                        .digits()
                        .ok_or_else(|| cur.err("expected exponent after '^'"))?;
                    exp = d.parse().map_err(|_| cur.err("exponent too large"))?;
                } else {
                    cur.pos = after_var;
                }
                factors.push((offset, name.to_string(), exp));
            }
            None if had_star => return Err(cur.err("expected variable after '*'")),
            None => {
                cur.pos = save;
                break;
            }
        }
    }
    let coeff = match coeff {
        Some(c) => c,
        None if !factors.is_empty() => BigInt::one(),
        None => return Err(cur.err("expected a term")),
    };
    Ok(RawTerm {
        coeff: if negate { -coeff } else { coeff },
        factors,
    })
}
