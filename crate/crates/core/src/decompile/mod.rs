//! Translation of loss equations into preference structures.

use crate::error::Result;
use crate::logic::{minimize_or_keep, union_atoms, Atom, Expr, Formula};
use crate::poly::{reference_atoms, Literal, LossEquation, Polynomial, Term};
use crate::prefstruct::{implication_form, implication_view, PreferenceStructure};

/// A decompiled equation: the structure plus the formulas of its two sides.
#[derive(Debug, Clone)]
pub struct Decompiled {
    pub structure: PreferenceStructure,
    /// `Sem(top)` over the atoms of the top polynomial.
    pub top_sem: Formula,
    /// `Sem(bottom)` over the atoms of the bottom polynomial.
    pub bottom_sem: Formula,
}

fn literal_expr(l: &Literal) -> Expr {
    let a = Expr::Atom(l.atom.clone());
    if l.positive {
        a
    } else {
        Expr::not(a)
    }
}

fn term_expr(t: &Term) -> Expr {
    Expr::and_all(t.literals().iter().map(literal_expr).collect())
}

/// The expression tree for a polynomial: products become conjunctions,
/// sums disjunctions and `1 - x` negation.
pub fn sem_expr(p: &Polynomial) -> Expr {
    Expr::or_all(p.terms().iter().map(term_expr).collect())
}

/// `Sem(p)` over the atoms `p` mentions. `p` must be disjoint.
pub fn sem(p: &Polynomial) -> Result<Formula> {
    p.check_disjoint()?;
    Formula::with_atoms(sem_expr(p), &p.atoms())
}

/// `implication_form(Sem(top), Sem(bottom))` with minimized parts.
pub fn decompile(eq: &LossEquation) -> Result<Decompiled> {
    let top_sem = sem(&eq.top)?;
    let bottom_sem = sem(&eq.bottom)?;
    let structure = implication_form(&top_sem, &bottom_sem)?;
    Ok(Decompiled {
        structure,
        top_sem,
        bottom_sem,
    })
}

/// Structure of the reference form: `Sem(top) ∧ ref(yl)` against
/// `Sem(bottom) ∧ ref(yw)`. Colliding reference atoms are replaced by the
/// same fresh copies the equation-level transform would use.
pub fn reference_structure(d: &Decompiled) -> Result<Decompiled> {
    reference_from_pair(&d.top_sem, &d.bottom_sem)
}

/// [`reference_structure`] for a caller-supplied `(Pw, Pl)` pair.
pub fn reference_from_pair(pw: &Formula, pl: &Formula) -> Result<Decompiled> {
    let (loser, winner) = reference_atoms(pw.atoms(), pl.atoms());
    let top_sem = pw.and(&Formula::from_atom(loser))?;
    let bottom_sem = pl.and(&Formula::from_atom(winner))?;
    let structure = implication_form(&top_sem, &bottom_sem)?;
    Ok(Decompiled {
        structure,
        top_sem,
        bottom_sem,
    })
}

/// Decompilation for the fuzzy relaxation: `P := Sem(bottom) → Sem(top)`
/// with `PC = ⊤` and `PA = ⊥`. Simplifying changes the expression tree and
/// therefore the fuzzy value, so it is opt-in.
pub fn decompile_fuzzy(eq: &LossEquation, simplify: bool) -> Result<PreferenceStructure> {
    let top = sem(&eq.top)?;
    let bottom = sem(&eq.bottom)?;
    let atoms: Vec<Atom> = union_atoms(top.atoms(), bottom.atoms());
    let p = Formula::with_atoms(Expr::implies(bottom.expr().clone(), top.expr().clone()), &atoms)?;
    let p = if simplify {
        let minimized = minimize_or_keep(&p);
        Formula::with_atoms(implication_view(minimized.expr()), &atoms)?
    } else {
        p
    };
    PreferenceStructure::with_atoms(p, Formula::top(&atoms)?, Formula::bottom(&atoms)?, &atoms)
}
