//! Propositional formulas over prediction atoms, canonicalized as truth tables.

pub mod atom;
pub mod formula;
pub mod minimize;
pub mod table;

pub use atom::{canonical_order, Atom, Model, Role};
pub use formula::{harmonize, parse_expr, parse_formula, union_atoms, Expr, Formula};
pub use minimize::{formula_of, minimize, minimize_or_keep, Cube, MAX_MINIMIZE_ATOMS};
pub use table::{check_atom_count, Bits, TruthTable, MAX_ATOMS};

/// Satisfying assignments of `f`.
pub fn models_of(f: &Formula) -> &TruthTable {
    f.models()
}

pub fn equivalent(a: &Formula, b: &Formula) -> crate::Result<bool> {
    a.equivalent(b)
}

pub fn entails_formula(a: &Formula, b: &Formula) -> crate::Result<bool> {
    a.entails(b)
}
