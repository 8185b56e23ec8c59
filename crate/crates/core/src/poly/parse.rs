//! Tokenizer and parser for the loss-equation grammar:
//!
//! ```text
//! equation := poly "/" poly
//! poly     := term ("+" term)*
//! term     := factor ("*" factor)*
//! factor   := atomref ["^" int] | "(1 - " atomref ")" ["^" int] | "(" poly ")" | "1"
//! atomref  := "p(" model "," role ["," "copy" int] ")"
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::{canonical_order, Atom, Model, Role};

use super::{copy_allocator, Literal, LossEquation, Polynomial, Term};

/// One factor as written, before exponents are removed.
#[derive(Debug, Clone, PartialEq)]
pub struct RawFactor {
    pub atom: Atom,
    pub positive: bool,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawTerm {
    pub factors: Vec<RawFactor>,
}

/// Sum of products with parenthesized sums already distributed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawPolynomial {
    pub terms: Vec<RawTerm>,
}

impl RawPolynomial {
    pub fn atoms(&self) -> Vec<Atom> {
        canonical_order(self.terms.iter().flat_map(|t| t.factors.iter().map(|f| f.atom.clone())))
    }

    fn one() -> Self {
        RawPolynomial {
            terms: vec![RawTerm::default()],
        }
    }

    fn times(&self, other: &RawPolynomial) -> RawPolynomial {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                terms.push(RawTerm { factors });
            }
        }
        RawPolynomial { terms }
    }
}

impl fmt::Display for RawFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lit = Literal {
            atom: self.atom.clone(),
            positive: self.positive,
        };
        if self.exponent == 1.0 {
            write!(f, "{lit}")
        } else {
            write!(f, "{lit}^{}", self.exponent)
        }
    }
}

impl fmt::Display for RawTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Number(String),
    Ident(String),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((pos, tok));
            chars.next();
        } else if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() || c == '.' {
            let mut s = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_digit() || d == '.' {
                    s.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push((pos, Tok::Number(s)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    s.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push((pos, Tok::Ident(s)));
        } else {
            return Err(Error::Syntax {
                pos,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            at: 0,
            end: text.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.at + k).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    fn done(&self) -> bool {
        self.at >= self.toks.len()
    }

    fn poly(&mut self) -> Result<RawPolynomial> {
        let mut terms = self.term()?.terms;
        while self.peek() == Some(&Tok::Plus) {
            self.at += 1;
            terms.extend(self.term()?.terms);
        }
        Ok(RawPolynomial { terms })
    }

    fn term(&mut self) -> Result<RawPolynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.at += 1;
            acc = acc.times(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RawPolynomial> {
        match self.peek() {
            Some(Tok::Ident(name)) if name == "p" => {
                let atom = self.atomref()?;
                let exponent = self.exponent()?;
                Ok(single(atom, true, exponent))
            }
            Some(Tok::Number(n)) if n == "1" => {
                self.at += 1;
                Ok(RawPolynomial::one())
            }
            Some(Tok::LParen) => {
                let complement =
                    matches!(self.peek_at(1), Some(Tok::Number(n)) if n == "1") && self.peek_at(2) == Some(&Tok::Minus);
                self.at += 1;
                if complement {
                    self.at += 2;
                    let atom = self.atomref()?;
                    self.expect(Tok::RParen, "`)` closing `(1 - ...`")?;
                    let exponent = self.exponent()?;
                    Ok(single(atom, false, exponent))
                } else {
                    let inner = self.poly()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(inner)
                }
            }
            _ => self.error("expected `p(...)`, `(1 - p(...))`, `1` or `(`"),
        }
    }

    fn exponent(&mut self) -> Result<f64> {
        if self.peek() != Some(&Tok::Caret) {
            return Ok(1.0);
        }
        self.at += 1;
        match self.peek() {
            Some(Tok::Number(n)) => {
                let text = n.clone();
                let value: f64 = text.parse().or_else(|_| self.error(format!("bad number `{text}`")))?;
                self.at += 1;
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(Error::NonIntegerExponent(text));
                }
                Ok(value)
            }
            Some(Tok::Minus) => Err(Error::NonIntegerExponent("negative".into())),
            _ => self.error("expected exponent"),
        }
    }

    fn atomref(&mut self) -> Result<Atom> {
        let p = self.ident("`p`")?;
        if p != "p" {
            return self.error("expected `p`");
        }
        self.expect(Tok::LParen, "`(` after `p`")?;
        let model = Model::parse(&self.ident("model name")?)?;
        self.expect(Tok::Comma, "`,`")?;
        let role = Role::parse(&self.ident("role `yw` or `yl`")?)?;
        let mut copy = 1;
        if self.peek() == Some(&Tok::Comma) {
            self.at += 1;
            // accepts both `copy 2` and `copy2`
            let word = self.ident("`copy`")?;
            let digits = match word.strip_prefix("copy") {
                Some("") => match self.peek() {
                    Some(Tok::Number(n)) => {
                        let n = n.clone();
                        self.at += 1;
                        n
                    }
                    _ => return self.error("expected copy index"),
                },
                Some(rest) => rest.to_string(),
                None => return self.error("expected `copy`"),
            };
            copy = match digits.parse::<u32>() {
                Ok(c) if c >= 1 => c,
                _ => return self.error(format!("bad copy index `{digits}`")),
            };
        }
        self.expect(Tok::RParen, "`)` closing `p(...`")?;
        Ok(Atom::with_copy(model, role, copy))
    }
}

fn single(atom: Atom, positive: bool, exponent: f64) -> RawPolynomial {
    RawPolynomial {
        terms: vec![RawTerm {
            factors: vec![RawFactor {
                atom,
                positive,
                exponent,
            }],
        }],
    }
}

/// Parse a polynomial without removing exponents.
pub fn parse_raw_polynomial(text: &str) -> Result<RawPolynomial> {
    let mut p = Parser::new(text)?;
    let poly = p.poly()?;
    if !p.done() {
        return p.error("unexpected trailing input");
    }
    Ok(poly)
}

/// Parse and multilinearize a single polynomial.
pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    make_multilinear(&parse_raw_polynomial(text)?)
}

/// Parse `top / bottom`; both sides must be disjoint.
pub fn parse_equation(text: &str) -> Result<LossEquation> {
    let mut p = Parser::new(text)?;
    let top = p.poly()?;
    p.expect(Tok::Slash, "`/`")?;
    let bottom = p.poly()?;
    if !p.done() {
        return p.error("unexpected trailing input");
    }
    let mut sides = multilinearize(&[&top, &bottom])?.into_iter();
    let (top, bottom) = (sides.next().unwrap(), sides.next().unwrap());
    LossEquation::new(top, bottom)
}

/// Replace `x^k` by `x · x(copy 2) · … · x(copy k)`.
pub fn make_multilinear(raw: &RawPolynomial) -> Result<Polynomial> {
    Ok(multilinearize(&[raw])?.pop().unwrap())
}

/// Copies are shared across all given polynomials: the same atom raised to
/// the same power always expands to the same copy atoms.
fn multilinearize(raws: &[&RawPolynomial]) -> Result<Vec<Polynomial>> {
    let atoms = canonical_order(raws.iter().flat_map(|r| r.atoms()));
    let mut fresh = copy_allocator(&atoms);
    let mut assigned: BTreeMap<Atom, Vec<Atom>> = BTreeMap::new();
    let mut out = Vec::with_capacity(raws.len());
    for raw in raws {
        let mut terms = Vec::with_capacity(raw.terms.len());
        for term in &raw.terms {
            let mut power: BTreeMap<&Atom, (bool, u32)> = BTreeMap::new();
            for factor in &term.factors {
                let k = integer_exponent(factor.exponent)?;
                let slot = power.entry(&factor.atom).or_insert((factor.positive, 0));
                if slot.0 != factor.positive {
                    return Err(Error::ContradictoryTerm(term.to_string(), factor.atom.to_string()));
                }
                slot.1 += k;
            }
            let mut literals = Vec::new();
            for (&atom, &(positive, k)) in &power {
                literals.push(Literal {
                    atom: atom.clone(),
                    positive,
                });
                let copies = assigned.entry(atom.clone()).or_default();
                while copies.len() + 1 < k as usize {
                    copies.push(fresh(atom));
                }
                literals.extend(copies[..k as usize - 1].iter().map(|c| Literal {
                    atom: c.clone(),
                    positive,
                }));
            }
            terms.push(Term::new(literals)?);
        }
        out.push(Polynomial::new(terms));
    }
    Ok(out)
}

fn integer_exponent(e: f64) -> Result<u32> {
    if e.is_finite() && e >= 1.0 && e.fract() == 0.0 && e <= u32::MAX as f64 {
        Ok(e as u32)
    } else {
        Err(Error::NonIntegerExponent(e.to_string()))
    }
}
