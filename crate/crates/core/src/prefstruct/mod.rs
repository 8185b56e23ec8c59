//! Preference structures `(P, PC, PA)` and their formula forms.

mod marks;

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{canonical_order, minimize_or_keep, parse_formula, union_atoms, Atom, Bits, Expr, Formula};

pub use marks::{from_marks, Mark, MarkTable};

/// A core formula `P`, conditioning constraints `PC` and additive
/// constraints `PA`, all over one canonical atom order.
#[derive(Debug, Clone)]
pub struct PreferenceStructure {
    atoms: Vec<Atom>,
    p: Formula,
    pc: Formula,
    pa: Formula,
    pub name: Option<String>,
}

impl PreferenceStructure {
    /// Extends all three formulas to the union of their atoms.
    pub fn new(p: Formula, pc: Formula, pa: Formula) -> Result<Self> {
        let atoms = union_atoms(&union_atoms(p.atoms(), pc.atoms()), pa.atoms());
        Self::with_atoms(p, pc, pa, &atoms)
    }

    pub fn with_atoms(p: Formula, pc: Formula, pa: Formula, atoms: &[Atom]) -> Result<Self> {
        let atoms = canonical_order(
            atoms
                .iter()
                .chain(p.atoms())
                .chain(pc.atoms())
                .chain(pa.atoms())
                .cloned(),
        );
        Ok(PreferenceStructure {
            p: p.extend_to(&atoms)?,
            pc: pc.extend_to(&atoms)?,
            pa: pa.extend_to(&atoms)?,
            atoms,
            name: None,
        })
    }

    /// `(P, ⊤, ⊥)`: the standard semantic loss of `P`.
    pub fn plain(p: Formula) -> Result<Self> {
        let atoms = p.atoms().to_vec();
        Self::with_atoms(p, Formula::top(&atoms)?, Formula::bottom(&atoms)?, &atoms)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn p(&self) -> &Formula {
        &self.p
    }

    pub fn pc(&self) -> &Formula {
        &self.pc
    }

    pub fn pa(&self) -> &Formula {
        &self.pa
    }

    /// `(P ∨ PA) ∧ PC`
    pub fn formula_form(&self) -> Formula {
        self.p
            .or(&self.pa)
            .and_then(|f| f.and(&self.pc))
            .expect("shared atom order")
    }

    /// `(¬P ∨ PA) ∧ PC`
    pub fn negated_form(&self) -> Formula {
        self.p
            .not()
            .or(&self.pa)
            .and_then(|f| f.and(&self.pc))
            .expect("shared atom order")
    }

    /// Rows marked with a check: models of the formula form.
    pub fn check(&self) -> Bits {
        self.p.bits().or(self.pa.bits()).and(self.pc.bits())
    }

    /// Rows marked with a cross: models of the negated formula form.
    pub fn cross(&self) -> Bits {
        self.p.bits().not().or(self.pa.bits()).and(self.pc.bits())
    }

    pub fn extend_to(&self, atoms: &[Atom]) -> Result<Self> {
        let mut out = Self::with_atoms(self.p.clone(), self.pc.clone(), self.pa.clone(), atoms)?;
        out.name = self.name.clone();
        Ok(out)
    }

    pub fn is_nontrivial(&self) -> bool {
        is_nontrivial(self)
    }

    pub fn to_marks(&self) -> MarkTable {
        MarkTable::from_sets(self.atoms.clone(), &self.check(), &self.cross())
    }

    /// `(P ∨ ¬P ∨ PA) ∧ PC ≡ PC` rows: where the loss is defined at all.
    pub fn support(&self) -> Bits {
        self.check().or(&self.cross())
    }

    pub fn to_json_value(&self) -> StructureJson {
        StructureJson {
            atoms: self.atoms.iter().map(Atom::to_string).collect(),
            p: self.p.to_string(),
            pc: self.pc.to_string(),
            pa: self.pa.to_string(),
            name: self.name.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("structures always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StructureJson = serde_json::from_str(text)?;
        raw.into_structure()
    }
}

/// On-disk form: `{"atoms": [...], "P": "...", "PC": "...", "PA": "...", "name": ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureJson {
    pub atoms: Vec<String>,
    #[serde(rename = "P")]
    pub p: String,
    #[serde(rename = "PC")]
    pub pc: String,
    #[serde(rename = "PA")]
    pub pa: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl StructureJson {
    pub fn into_structure(self) -> Result<PreferenceStructure> {
        let atoms = self.atoms.iter().map(|a| a.parse()).collect::<Result<Vec<Atom>>>()?;
        let mut s = PreferenceStructure::with_atoms(
            parse_formula(&self.p, &atoms)?,
            parse_formula(&self.pc, &atoms)?,
            parse_formula(&self.pa, &atoms)?,
            &atoms,
        )?;
        s.name = self.name;
        Ok(s)
    }
}

impl fmt::Display for PreferenceStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            writeln!(f, "{name}")?;
        }
        writeln!(f, "P  := {}", self.p)?;
        writeln!(f, "PC := {}", self.pc)?;
        write!(f, "PA := {}", self.pa)
    }
}

/// Two structures are the same when their formula forms coincide.
impl PartialEq for PreferenceStructure {
    fn eq(&self, other: &Self) -> bool {
        pref_equivalent(self, other).unwrap_or(false)
    }
}

/// `((P ∨ PA) ∧ PC, (¬P ∨ PA) ∧ PC)`
pub fn formula_forms(s: &PreferenceStructure) -> (Formula, Formula) {
    (s.formula_form(), s.negated_form())
}

/// The structure `(Pl → Pw, Pw ∨ Pl, Pw ∧ Pl)`, each part minimized, whose
/// formula forms are equivalent to `(Pw, Pl)`.
pub fn implication_form(pw: &Formula, pl: &Formula) -> Result<PreferenceStructure> {
    let atoms = union_atoms(pw.atoms(), pl.atoms());
    let pw = pw.extend_to(&atoms)?;
    let pl = pl.extend_to(&atoms)?;
    let p = minimize_or_keep(&pl.implies(&pw)?);
    let p = Formula::with_atoms(implication_view(p.expr()), &atoms)?;
    let pc = minimize_or_keep(&pw.or(&pl)?);
    let pa = minimize_or_keep(&pw.and(&pl)?);
    PreferenceStructure::with_atoms(p, pc, pa, &atoms)
}

/// Rewrite a disjunction with negated-atom disjuncts `¬a ∨ ¬b ∨ rest` as
/// `(a ∧ b) → rest`.
pub(crate) fn implication_view(expr: &Expr) -> Expr {
    let Expr::Or(parts) = expr else {
        return expr.clone();
    };
    let (negated, rest): (Vec<&Expr>, Vec<&Expr>) = parts
        .iter()
        .partition(|e| matches!(e, Expr::Not(inner) if matches!(**inner, Expr::Atom(_))));
    if negated.is_empty() || rest.is_empty() {
        return expr.clone();
    }
    let mut premises: Vec<Atom> = negated
        .into_iter()
        .map(|e| match e {
            Expr::Not(inner) => match &**inner {
                Expr::Atom(a) => a.clone(),
                _ => unreachable!(),
            },
            _ => unreachable!(),
        })
        .collect();
    premises.sort();
    let premises = premises.into_iter().map(Expr::Atom).collect();
    Expr::implies(
        Expr::and_all(premises),
        Expr::or_all(rest.into_iter().cloned().collect()),
    )
}

fn harmonized(
    s1: &PreferenceStructure,
    s2: &PreferenceStructure,
) -> Result<(PreferenceStructure, PreferenceStructure)> {
    let atoms = union_atoms(s1.atoms(), s2.atoms());
    Ok((s1.extend_to(&atoms)?, s2.extend_to(&atoms)?))
}

/// `s1 ⊑ s2`: `check1 ⊆ check2` and `cross2 ⊆ cross1`.
pub fn pref_entails(s1: &PreferenceStructure, s2: &PreferenceStructure) -> Result<bool> {
    let (a, b) = harmonized(s1, s2)?;
    Ok(a.check().is_subset(&b.check()) && b.cross().is_subset(&a.cross()))
}

pub fn pref_equivalent(s1: &PreferenceStructure, s2: &PreferenceStructure) -> Result<bool> {
    let (a, b) = harmonized(s1, s2)?;
    Ok(a.check() == b.check() && a.cross() == b.cross())
}

/// Check and cross sets differ and neither is empty.
pub fn is_nontrivial(s: &PreferenceStructure) -> bool {
    let (check, cross) = (s.check(), s.cross());
    !check.none() && !cross.none() && check != cross
}

/// Largest atom count accepted by [`count_structures`].
pub const MAX_COUNT_ATOMS: u32 = 20;

/// `4^(2^n)`: ordered pairs of Boolean functions over `n` atoms.
pub fn count_structures(n: u32) -> Result<BigUint> {
    if n == 0 || n > MAX_COUNT_ATOMS {
        return Err(Error::InvalidArgument(format!(
            "atom count must be between 1 and {MAX_COUNT_ATOMS}, got {n}"
        )));
    }
    Ok(BigUint::from(1u8) << (1usize << (n + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Role};

    fn wl() -> Vec<Atom> {
        vec![Atom::theta(Role::Winner), Atom::theta(Role::Loser)]
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, &wl()).unwrap()
    }

    fn structure(p: &str, pc: &str, pa: &str) -> PreferenceStructure {
        PreferenceStructure::new(f(p), f(pc), f(pa)).unwrap()
    }

    fn cpo() -> PreferenceStructure {
        structure(
            "(implies theta:yl theta:yw)",
            "(or theta:yl theta:yw)",
            "(and theta:yl theta:yw)",
        )
    }

    fn orpo() -> PreferenceStructure {
        structure("(implies theta:yl theta:yw)", "(xor theta:yl theta:yw)", "false")
    }

    fn uncpo() -> PreferenceStructure {
        structure("(implies theta:yl theta:yw)", "true", "false")
    }

    #[test]
    fn cpo_forms_are_atoms() {
        let (fw, fl) = formula_forms(&cpo());
        assert!(fw.equivalent(&f("theta:yw")).unwrap());
        assert!(fl.equivalent(&f("theta:yl")).unwrap());
    }

    #[test]
    fn plain_forms() {
        let s = structure("theta:yw", "true", "false");
        let (fw, fl) = formula_forms(&s);
        assert!(fw.equivalent(&f("theta:yw")).unwrap());
        assert!(fl.equivalent(&f("(not theta:yw)")).unwrap());
    }

    #[test]
    fn orpo_one_hot() {
        let s = orpo();
        // rows: 0=FF 1=FT 2=TF 3=TT
        assert_eq!(s.check(), Bits::from_rows(4, [2]));
        assert_eq!(s.cross(), Bits::from_rows(4, [1]));
    }

    #[test]
    fn implication_form_examples() {
        let s = implication_form(&f("theta:yw"), &f("theta:yl")).unwrap();
        assert!(pref_equivalent(&s, &cpo()).unwrap());
        assert_eq!(s.p().to_string(), "(implies theta:yl theta:yw)");
        assert_eq!(s.pc().to_string(), "(or theta:yl theta:yw)");
        assert_eq!(s.pa().to_string(), "(and theta:yw theta:yl)");

        let s = implication_form(&f("theta:yw"), &f("(not theta:yw)")).unwrap();
        assert_eq!(s.p().to_string(), "theta:yw");
        assert!(s.pc().is_tautology() && s.pa().is_unsatisfiable());

        let s = implication_form(&f("(and theta:yw (not theta:yl))"), &f("(and theta:yl (not theta:yw))")).unwrap();
        assert!(s.pc().equivalent(&f("(xor theta:yw theta:yl)")).unwrap());
        assert!(s.pa().is_unsatisfiable());
        assert!(pref_equivalent(&s, &orpo()).unwrap());
    }

    #[test]
    fn entailment_examples() {
        assert!(pref_entails(&cpo(), &uncpo()).unwrap());
        assert!(!pref_entails(&uncpo(), &cpo()).unwrap());
        assert!(pref_entails(&orpo(), &uncpo()).unwrap());
        assert!(!pref_entails(&cpo(), &orpo()).unwrap());
        assert!(!pref_entails(&orpo(), &cpo()).unwrap());
        assert!(pref_entails(&cpo(), &cpo()).unwrap());
    }

    #[test]
    fn equivalence_ignores_unused_atoms() {
        let s = cpo();
        let wider = s.extend_to(&[Atom::reference(Role::Winner)]).unwrap();
        assert_eq!(wider.atoms().len(), 3);
        assert!(pref_equivalent(&s, &wider).unwrap());
        assert!(!pref_equivalent(&cpo(), &orpo()).unwrap());
    }

    #[test]
    fn nontriviality() {
        assert!(cpo().is_nontrivial());
        assert!(!implication_form(&f("theta:yw"), &f("theta:yw"))
            .unwrap()
            .is_nontrivial());
        assert!(!implication_form(&f("false"), &f("theta:yw")).unwrap().is_nontrivial());
    }

    #[test]
    fn counts() {
        assert_eq!(count_structures(1).unwrap(), BigUint::from(16u32));
        assert_eq!(count_structures(2).unwrap(), BigUint::from(256u32));
        assert_eq!(count_structures(4).unwrap(), BigUint::from(4_294_967_296u64));
        assert!(count_structures(0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = cpo().named("CPO");
        let back = PreferenceStructure::from_json(&s.to_json()).unwrap();
        assert_eq!(back.name.as_deref(), Some("CPO"));
        assert!(pref_equivalent(&s, &back).unwrap());
        let bad = r#"{"atoms":["theta:yw"],"P":"theta:yl","PC":"true","PA":"false"}"#;
        assert!(matches!(
            PreferenceStructure::from_json(bad),
            Err(Error::UndeclaredAtom(_))
        ));
    }

    #[test]
    fn mark_algebra() {
        for s in [cpo(), orpo(), uncpo()] {
            assert_eq!(s.support(), *s.pc().bits());
            assert_eq!(s.check().and(&s.cross()), s.pa().bits().and(s.pc().bits()));
        }
    }
}
