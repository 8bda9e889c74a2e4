//! Parser for the canonical text form produced by `Display`.
//!
//! Accepts a superset of the canonical output: parentheses, integer powers of
//! parenthesized groups and division by rational constants are allowed, which
//! keeps hand-written fixtures close to their printed source.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{GradedSeries, SymPoly, Symbol, SymbolicError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>, SymbolicError> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            '0'..='9' => {
                let start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Tok::Num(src[start..i].parse().expect("digits")));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                if &src[start..i] == "mu" && i < b.len() && b[i] == b'[' {
                    while i < b.len() && b[i] != b']' {
                        i += 1;
                    }
                    if i == b.len() {
                        return Err(SymbolicError::Parse(format!("unterminated mu[...] in `{src}`")));
                    }
                    i += 1;
                }
                out.push(Tok::Ident(src[start..i].to_string()));
            }
            other => {
                return Err(SymbolicError::Parse(format!("unexpected character `{other}` in `{src}`")))
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn err<T>(&self, msg: &str) -> Result<T, SymbolicError> {
        Err(SymbolicError::Parse(format!("{msg} at token {}", self.pos)))
    }

    fn expr(&mut self) -> Result<SymPoly, SymbolicError> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -self.term()?
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SymPoly, SymbolicError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul_ref(&self.power()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = self.power()?;
                    match d.as_constant() {
                        Some(c) if !c.is_zero() => acc = acc.scale(&(BigRational::from_integer(1.into()) / c)),
                        _ => return self.err("division by a non-constant or zero"),
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<SymPoly, SymbolicError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.next() {
                Some(Tok::Num(n)) => {
                    let e: u32 = n.try_into().map_err(|_| SymbolicError::Parse("exponent too large".into()))?;
                    Ok(base.pow(e))
                }
                _ => self.err("expected integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<SymPoly, SymbolicError> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(SymPoly::constant(BigRational::from_integer(n))),
            Some(Tok::Ident(name)) => Ok(SymPoly::var(name.parse::<Symbol>()?)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => self.err("expected `)`"),
                }
            }
            Some(Tok::Minus) => Ok(-self.power()?),
            _ => self.err("expected number, symbol or `(`"),
        }
    }
}

/// Parses a polynomial expression.
pub fn parse_poly(src: &str) -> Result<SymPoly, SymbolicError> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(SymbolicError::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(out)
}

/// Parses the `e^k: <poly>` line format of [`GradedSeries`]'s `Display`.
pub fn parse_series(src: &str, cap: usize) -> Result<GradedSeries, SymbolicError> {
    let mut coeffs = vec![SymPoly::zero(); cap + 1];
    let trimmed = src.trim();
    if trimmed == "0" {
        return Ok(GradedSeries::zero(cap));
    }
    for line in trimmed.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (head, body) = line
            .split_once(':')
            .ok_or_else(|| SymbolicError::Parse(format!("missing `:` in series line `{line}`")))?;
        let k: usize = head
            .trim()
            .strip_prefix("e^")
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| SymbolicError::Parse(format!("bad order label `{head}`")))?;
        if k > cap {
            return Err(SymbolicError::Parse(format!("order {k} exceeds cap {cap}")));
        }
        coeffs[k].add_assign_ref(&parse_poly(body)?);
    }
    Ok(GradedSeries::from_coeffs(coeffs, cap))
}
