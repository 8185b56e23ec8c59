//! Disjoint multilinear polynomials and loss equations `log(top / bottom)`.

mod parse;
mod weights;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};
use crate::logic::{canonical_order, Atom, Role};

pub use parse::{
    make_multilinear, parse_equation, parse_polynomial, parse_raw_polynomial, RawFactor, RawPolynomial, RawTerm,
};
pub use weights::{clamp_probability, WeightMap, EPS};

/// `x` (positive) or `1 - x` (negative).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, positive: false }
    }

    pub fn value(&self, weights: &WeightMap) -> Result<f64> {
        let p = weights.get(&self.atom)?;
        Ok(if self.positive { p } else { 1.0 - p })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.atom;
        let prob = if a.copy > 1 {
            format!("p({},{},copy {})", a.model.name(), a.role.token(), a.copy)
        } else {
            format!("p({},{})", a.model.name(), a.role.token())
        };
        if self.positive {
            f.write_str(&prob)
        } else {
            write!(f, "(1 - {prob})")
        }
    }
}

/// Product of literals, at most one per atom, kept in canonical atom order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    literals: Vec<Literal>,
}

impl Term {
    /// The empty product, 1.
    pub fn one() -> Self {
        Term { literals: Vec::new() }
    }

    pub fn new(mut literals: Vec<Literal>) -> Result<Self> {
        literals.sort_by(|a, b| a.atom.cmp(&b.atom));
        for pair in literals.windows(2) {
            if pair[0].atom == pair[1].atom {
                let term = Term {
                    literals: literals.clone(),
                };
                return Err(Error::ContradictoryTerm(term.to_string(), pair[0].atom.to_string()));
            }
        }
        Ok(Term { literals })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn literal_for(&self, atom: &Atom) -> Option<&Literal> {
        self.literals.iter().find(|l| &l.atom == atom)
    }

    /// An atom on which the two terms take opposite polarities.
    pub fn conflict_with(&self, other: &Term) -> Option<&Atom> {
        self.literals.iter().find_map(|l| {
            other
                .literal_for(&l.atom)
                .filter(|m| m.positive != l.positive)
                .map(|_| &l.atom)
        })
    }

    /// Multiply by a literal on an atom the term does not mention.
    pub fn times_literal(&self, literal: Literal) -> Result<Term> {
        let mut literals = self.literals.clone();
        literals.push(literal);
        Term::new(literals)
    }

    pub fn eval(&self, weights: &WeightMap) -> Result<f64> {
        self.literals.iter().try_fold(1.0, |acc, l| Ok(acc * l.value(weights)?))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Sum of product terms. The empty sum is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: Vec<Term>,
}

/// Two terms of a polynomial with a common satisfying assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjointViolation {
    pub first: usize,
    pub second: usize,
    pub first_term: String,
    pub second_term: String,
    pub witness: String,
}

impl From<DisjointViolation> for Error {
    fn from(v: DisjointViolation) -> Error {
        Error::NonDisjoint {
            first: v.first_term,
            second: v.second_term,
            witness: v.witness,
        }
    }
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn new(terms: Vec<Term>) -> Self {
        Polynomial { terms }
    }

    pub fn from_literal(literal: Literal) -> Self {
        Polynomial {
            terms: vec![Term::new(vec![literal]).unwrap()],
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn atoms(&self) -> Vec<Atom> {
        canonical_order(
            self.terms
                .iter()
                .flat_map(|t| t.literals.iter().map(|l| l.atom.clone())),
        )
    }

    /// Every pair of terms must disagree in polarity on some atom.
    pub fn check_disjoint(&self) -> std::result::Result<(), DisjointViolation> {
        for i in 0..self.terms.len() {
            for j in i + 1..self.terms.len() {
                let (a, b) = (&self.terms[i], &self.terms[j]);
                if a.conflict_with(b).is_none() {
                    let mut witness: BTreeMap<&Atom, bool> = BTreeMap::new();
                    for l in a.literals.iter().chain(&b.literals) {
                        witness.insert(&l.atom, l.positive);
                    }
                    let witness = if witness.is_empty() {
                        "every assignment".to_string()
                    } else {
                        witness
                            .iter()
                            .map(|(a, &v)| format!("{a}={}", if v { 'T' } else { 'F' }))
                            .collect::<Vec<_>>()
                            .join(", ")
                    };
                    return Err(DisjointViolation {
                        first: i,
                        second: j,
                        first_term: a.to_string(),
                        second_term: b.to_string(),
                        witness,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_disjoint(&self) -> bool {
        self.check_disjoint().is_ok()
    }

    /// Sum over terms of the product of literal values.
    pub fn eval(&self, weights: &WeightMap) -> Result<f64> {
        self.terms.iter().try_fold(0.0, |acc, t| Ok(acc + t.eval(weights)?))
    }

    /// Multiply every term by `literal`, which no term may mention.
    pub fn times_literal(&self, literal: &Literal) -> Result<Polynomial> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.times_literal(literal.clone()))
            .collect::<Result<_>>()?;
        Ok(Polynomial { terms })
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// `Σ terms · Π literals` over `weights`.
pub fn eval_poly(p: &Polynomial, weights: &WeightMap) -> Result<f64> {
    p.eval(weights)
}

pub fn check_disjoint(p: &Polynomial) -> std::result::Result<(), DisjointViolation> {
    p.check_disjoint()
}

/// Convex function applied to a log-ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum FKind {
    /// `-log σ(β ρ)`
    #[default]
    #[serde(rename = "sl-log")]
    Log,
    /// `(ρ - 1/(2β))²`
    #[serde(rename = "sl-squared")]
    Squared,
    /// `max(0, β - ρ)`
    #[serde(rename = "sl-margin")]
    Margin,
}

impl FKind {
    pub const ALL: [FKind; 3] = [FKind::Log, FKind::Squared, FKind::Margin];

    pub fn name(self) -> &'static str {
        match self {
            FKind::Log => "sl-log",
            FKind::Squared => "sl-squared",
            FKind::Margin => "sl-margin",
        }
    }

    /// Apply to a ratio `rho` with weight `beta`.
    pub fn apply(self, rho: f64, beta: f64) -> f64 {
        match self {
            FKind::Log => softplus(-beta * rho),
            FKind::Squared => (rho - 1.0 / (2.0 * beta)).powi(2),
            FKind::Margin => (beta - rho).max(0.0),
        }
    }

    /// The loss as text over a ratio expression `rho`.
    pub fn render(self, rho: &str, beta: f64) -> String {
        match self {
            FKind::Log => format!("-log sigmoid({beta} * {rho})"),
            FKind::Squared => format!("({rho} - 1/(2 * {beta}))^2"),
            FKind::Margin => format!("max(0, {beta} - {rho})"),
        }
    }
}

/// `log(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

impl fmt::Display for FKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sl-log" => Ok(FKind::Log),
            "sl-squared" => Ok(FKind::Squared),
            "sl-margin" => Ok(FKind::Margin),
            other => Err(Error::InvalidArgument(format!("unknown loss variant `{other}`"))),
        }
    }
}

/// `f(log(top / bottom), beta)` with disjoint multilinear `top` and `bottom`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossEquation {
    pub top: Polynomial,
    pub bottom: Polynomial,
    pub f_kind: FKind,
    pub beta: f64,
}

impl LossEquation {
    /// Validates disjointness of both sides; `f_kind` and `beta` take defaults.
    pub fn new(top: Polynomial, bottom: Polynomial) -> Result<Self> {
        top.check_disjoint()?;
        bottom.check_disjoint()?;
        Ok(LossEquation {
            top,
            bottom,
            f_kind: FKind::default(),
            beta: 1.0,
        })
    }

    pub fn with_f(mut self, f_kind: FKind, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        self.f_kind = f_kind;
        self.beta = beta;
        Ok(self)
    }

    pub fn atoms(&self) -> Vec<Atom> {
        canonical_order(self.top.atoms().into_iter().chain(self.bottom.atoms()))
    }

    /// `log(top / bottom)` over clamped weights.
    pub fn log_ratio(&self, weights: &WeightMap) -> Result<f64> {
        let top = self.top.eval(weights)?;
        let bottom = self.bottom.eval(weights)?;
        if top <= 0.0 {
            return Err(Error::ZeroCount(Side::Winner));
        }
        if bottom <= 0.0 {
            return Err(Error::ZeroCount(Side::Loser));
        }
        Ok((top / bottom).ln())
    }

    pub fn loss(&self, weights: &WeightMap) -> Result<f64> {
        Ok(self.f_kind.apply(self.log_ratio(weights)?, self.beta))
    }

    pub fn mentions_reference(&self) -> bool {
        self.atoms().iter().any(Atom::is_reference)
    }
}

impl fmt::Display for LossEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let compound =
            self.bottom.terms().len() > 1 || self.bottom.terms().first().is_some_and(|t| t.literals().len() > 1);
        if self.top.terms().len() > 1 {
            write!(f, "({})", self.top)?;
        } else {
            write!(f, "{}", self.top)?;
        }
        if compound {
            write!(f, " / ({})", self.bottom)
        } else {
            write!(f, " / {}", self.bottom)
        }
    }
}

pub fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("beta must be > 0, got {beta}")))
    }
}

/// Allocates copy atoms above every copy index already used in `atoms`.
pub(crate) fn copy_allocator(atoms: &[Atom]) -> impl FnMut(&Atom) -> Atom {
    let mut next: BTreeMap<Atom, u32> = BTreeMap::new();
    for a in atoms {
        let slot = next.entry(a.base()).or_insert(1);
        *slot = (*slot).max(a.copy);
    }
    move |atom: &Atom| {
        let slot = next.entry(atom.base()).or_insert(atom.copy);
        *slot += 1;
        Atom::with_copy(atom.model.clone(), atom.role, *slot)
    }
}

/// The atoms standing for `ref(yl)` on the top and `ref(yw)` on the bottom.
/// Where a side already mentions one, a fresh copy is used instead; copies
/// are allocated top first, above every index in either side.
pub fn reference_atoms(top: &[Atom], bottom: &[Atom]) -> (Atom, Atom) {
    let all = canonical_order(top.iter().chain(bottom).cloned());
    let mut fresh = copy_allocator(&all);
    let mut pick = |side: &[Atom], atom: Atom| if side.contains(&atom) { fresh(&atom) } else { atom };
    let loser = pick(top, Atom::reference(Role::Loser));
    let winner = pick(bottom, Atom::reference(Role::Winner));
    (loser, winner)
}

/// Subtract the reference log-ratio: `top · ref(yl) / (bottom · ref(yw))`.
pub fn reference_transform(eq: &LossEquation) -> Result<LossEquation> {
    if eq.mentions_reference() {
        log::warn!("equation already mentions reference atoms; colliding atoms are replaced by fresh copies");
    }
    let (loser, winner) = reference_atoms(&eq.top.atoms(), &eq.bottom.atoms());
    Ok(LossEquation {
        top: eq.top.times_literal(&Literal::pos(loser))?,
        bottom: eq.bottom.times_literal(&Literal::pos(winner))?,
        f_kind: eq.f_kind,
        beta: eq.beta,
    })
}
