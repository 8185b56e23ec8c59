//! Weighted model counting, the semantic loss of a preference structure,
//! compilation back to equations, and the R-product fuzzy relaxation.

use crate::error::{Error, Result, Side};
use crate::logic::minimize::{disjoint_cover, minimal_cover};
use crate::logic::{minimize_or_keep, Atom, Bits, Cube, Expr, Formula};
use crate::poly::{check_beta, FKind, Literal, LossEquation, Polynomial, Term, WeightMap, EPS};
use crate::prefstruct::{implication_view, PreferenceStructure};

/// Sum over the models of `f` of the product of atom weights.
pub fn wmc(f: &Formula, w: &WeightMap) -> Result<f64> {
    wmc_bits(f.bits(), f.atoms(), w)
}

pub(crate) fn wmc_bits(bits: &Bits, atoms: &[Atom], w: &WeightMap) -> Result<f64> {
    let weights = w.resolve(atoms)?;
    let n = atoms.len();
    let mut total = 0.0;
    for row in bits.ones() {
        let mut prod = 1.0;
        for (j, &p) in weights.iter().enumerate() {
            prod *= if (row >> (n - 1 - j)) & 1 == 1 { p } else { 1.0 - p };
        }
        total += prod;
    }
    Ok(total)
}

/// `log WMC((P ∨ PA) ∧ PC) / WMC((¬P ∨ PA) ∧ PC)`.
pub fn loss_ratio(s: &PreferenceStructure, w: &WeightMap) -> Result<f64> {
    let top = wmc_bits(&s.check(), s.atoms(), w)?;
    let bottom = wmc_bits(&s.cross(), s.atoms(), w)?;
    if top <= 0.0 {
        return Err(Error::ZeroCount(Side::Winner));
    }
    if bottom <= 0.0 {
        return Err(Error::ZeroCount(Side::Loser));
    }
    Ok((top / bottom).ln())
}

/// Everything needed to evaluate one semantic loss.
#[derive(Debug, Clone)]
pub struct LossValueRequest<'a> {
    pub structure: &'a PreferenceStructure,
    pub f_kind: FKind,
    pub beta: f64,
    pub weights: &'a WeightMap,
}

pub fn loss_value(r: &LossValueRequest<'_>) -> Result<f64> {
    check_beta(r.beta)?;
    Ok(r.f_kind.apply(loss_ratio(r.structure, r.weights)?, r.beta))
}

/// Disjoint sum-of-products polynomial whose terms partition `bits`.
pub fn disjoint_polynomial(bits: &Bits, atoms: &[Atom]) -> Polynomial {
    let n = atoms.len();
    let cubes = match minimal_cover(bits, n) {
        Ok(cover) => disjoint_cover(&cover, n),
        Err(_) => bits.ones().map(|r| Cube::minterm(r, n)).collect(),
    };
    let terms = cubes
        .iter()
        .map(|c| {
            let literals = c
                .literals(n)
                .into_iter()
                .map(|(j, positive)| Literal {
                    atom: atoms[j].clone(),
                    positive,
                })
                .collect();
            Term::new(literals).expect("cube literals are distinct")
        })
        .collect();
    Polynomial::new(terms)
}

/// The loss equation of a structure: top from the check rows, bottom from
/// the cross rows.
pub fn compile_equation(s: &PreferenceStructure) -> Result<LossEquation> {
    let (check, cross) = (s.check(), s.cross());
    if check.none() {
        return Err(Error::TrivialStructure("the check set is empty"));
    }
    if cross.none() {
        return Err(Error::TrivialStructure("the cross set is empty"));
    }
    let top = disjoint_polynomial(&check, s.atoms());
    let bottom = disjoint_polynomial(&cross, s.atoms());
    LossEquation::new(top, bottom)
}

/// R-product value of an expression tree.
pub fn fuzzy_eval(e: &Expr, w: &WeightMap) -> Result<f64> {
    Ok(match e {
        Expr::True => 1.0,
        Expr::False => 0.0,
        Expr::Atom(a) => w.get(a)?,
        Expr::Not(x) => 1.0 - fuzzy_eval(x, w)?,
        Expr::And(xs) => xs
            .iter()
            .try_fold(1.0, |acc, x| Ok::<_, Error>(acc * fuzzy_eval(x, w)?))?,
        Expr::Or(xs) => xs.iter().try_fold(0.0, |acc, x| {
            let b = fuzzy_eval(x, w)?;
            Ok::<_, Error>(acc + b - acc * b)
        })?,
        Expr::Implies(a, b) => r_implies(fuzzy_eval(a, w)?, fuzzy_eval(b, w)?),
        Expr::Xor(a, b) => {
            let (a, b) = (fuzzy_eval(a, w)?, fuzzy_eval(b, w)?);
            let (left, right) = (a * (1.0 - b), (1.0 - a) * b);
            left + right - left * right
        }
    })
}

/// `min(1, b / a)`, with 1 when `a = 0`.
fn r_implies(a: f64, b: f64) -> f64 {
    if a <= 0.0 {
        1.0
    } else {
        (b / a).min(1.0)
    }
}

/// The expression `fuzzy_value` evaluates: minimized (implications kept
/// readable) when `simplify_first` is set, otherwise the formula's own tree.
pub fn fuzzy_expr(f: &Formula, simplify_first: bool) -> Expr {
    if simplify_first {
        implication_view(minimize_or_keep(f).expr())
    } else {
        f.expr().clone()
    }
}

pub fn fuzzy_value(f: &Formula, w: &WeightMap, simplify_first: bool) -> Result<f64> {
    fuzzy_eval(&fuzzy_expr(f, simplify_first), w)
}

/// `-log [f]` with the value clamped away from zero.
pub fn fuzzy_loss(f: &Formula, w: &WeightMap, simplify_first: bool) -> Result<f64> {
    Ok(-fuzzy_value(f, w, simplify_first)?.max(EPS).ln())
}

/// The R-product value of `e` written as arithmetic over probabilities.
pub fn fuzzy_text(e: &Expr) -> String {
    match e {
        Expr::True => "1".into(),
        Expr::False => "0".into(),
        Expr::Atom(a) => Literal::pos(a.clone()).to_string(),
        Expr::Not(x) => match &**x {
            Expr::Atom(a) => Literal::neg(a.clone()).to_string(),
            other => format!("(1 - {})", fuzzy_text(other)),
        },
        Expr::And(xs) => xs.iter().map(wrap_sum).collect::<Vec<_>>().join(" * "),
        Expr::Or(xs) => {
            let mut acc = fuzzy_text(&xs[0]);
            for x in &xs[1..] {
                let b = fuzzy_text(x);
                acc = format!("({acc} + {b} - {acc} * {b})");
            }
            acc
        }
        Expr::Implies(a, b) => format!("min(1, {} / {})", wrap_sum(b), wrap_sum(a)),
        Expr::Xor(a, b) => {
            let (a, b) = (wrap_sum(a), wrap_sum(b));
            let (l, r) = (format!("{a} * (1 - {b})"), format!("(1 - {a}) * {b}"));
            format!("({l} + {r} - {l} * {r})")
        }
    }
}

fn wrap_sum(e: &Expr) -> String {
    let text = fuzzy_text(e);
    if matches!(e, Expr::And(_)) {
        format!("({text})")
    } else {
        text
    }
}
