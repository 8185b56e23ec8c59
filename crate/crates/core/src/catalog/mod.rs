//! Named losses bundled with the crate, loadable from a user file as well.

use std::path::Path;

use serde::Deserialize;

use crate::decompile::decompile;
use crate::error::{Error, Result};
use crate::logic::Atom;
use crate::poly::{parse_equation, FKind, LossEquation, WeightMap};
use crate::prefstruct::{from_marks, pref_equivalent, Mark, MarkTable, PreferenceStructure, StructureJson};
use crate::semantics::compile_equation;

const BUILTIN: &str = include_str!("../../data/catalog.json");

/// Weight preprocessing an entry needs before evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// Fill `mref` weights from a margin `gamma`.
    SimpoMargin,
    /// Gate the copied winner atoms (off unless requested).
    DpopMaxGate,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub provenance: String,
    pub equation: LossEquation,
    /// False when the equation was compiled from the marks.
    pub equation_given: bool,
    pub structure: PreferenceStructure,
    pub mark_table: MarkTable,
    pub weight_mode: Option<WeightMode>,
}

impl CatalogEntry {
    /// Apply the entry's weight preprocessing. `gamma` feeds the margin mode;
    /// the max gate only runs when `gate` is set.
    pub fn prepare_weights(&self, weights: WeightMap, gamma: Option<f64>, gate: bool) -> Result<WeightMap> {
        match self.weight_mode {
            Some(WeightMode::SimpoMargin) => match gamma {
                Some(g) => weights.with_simpo_margin(g),
                None => Ok(weights),
            },
            Some(WeightMode::DpopMaxGate) if gate => weights.with_dpop_max_gate(),
            _ => Ok(weights),
        }
    }

    fn check(&self) -> Result<()> {
        let invariant = |reason: String| Error::CatalogInvariant {
            name: self.name.clone(),
            reason,
        };
        let derived = decompile(&self.equation)?.structure;
        if !pref_equivalent(&derived, &self.structure)? {
            return Err(invariant(format!(
                "decompiled equation gives\n{derived}\nbut the entry states\n{}",
                self.structure
            )));
        }
        let marks = self.structure.extend_to(&self.mark_table.atoms)?.to_marks();
        if marks != self.mark_table {
            return Err(invariant("mark table does not match the structure".into()));
        }
        Ok(())
    }
}

/// Another name for an entry evaluated differently.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Alias {
    pub name: String,
    pub target: String,
    #[serde(default)]
    pub f_kind: Option<FKind>,
    #[serde(default)]
    pub fuzzy: bool,
}

/// A looked-up name: the entry plus any evaluation settings an alias implies.
#[derive(Debug, Clone, Copy)]
pub struct Resolved<'a> {
    pub entry: &'a CatalogEntry,
    pub alias: Option<&'a Alias>,
}

impl Resolved<'_> {
    pub fn f_kind(&self) -> Option<FKind> {
        self.alias.and_then(|a| a.f_kind)
    }

    pub fn fuzzy(&self) -> bool {
        self.alias.is_some_and(|a| a.fuzzy)
    }
}

#[derive(Debug, Deserialize)]
struct RawEntry {
    name: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    provenance: String,
    equation: Option<String>,
    structure: Option<StructureJson>,
    atoms: Option<Vec<String>>,
    marks: Option<Vec<Mark>>,
    weights: Option<WeightMode>,
}

#[derive(Debug, Deserialize)]
struct RawCatalog {
    entries: Vec<RawEntry>,
    #[serde(default)]
    aliases: Vec<Alias>,
}

#[derive(Debug, Clone)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
    aliases: Vec<Alias>,
}

impl Catalog {
    /// The bundled catalog, self-checked.
    pub fn builtin() -> Result<Catalog> {
        Catalog::from_json(BUILTIN)
    }

    pub fn from_path(path: &Path) -> Result<Catalog> {
        Catalog::from_json(&std::fs::read_to_string(path)?)
    }

    /// Parse and self-check a catalog document.
    pub fn from_json(text: &str) -> Result<Catalog> {
        let raw: RawCatalog = serde_json::from_str(text)?;
        let entries = raw.entries.into_iter().map(build_entry).collect::<Result<Vec<_>>>()?;
        let catalog = Catalog {
            entries,
            aliases: raw.aliases,
        };
        catalog.self_check()?;
        Ok(catalog)
    }

    /// Both entry invariants for every entry, unique names, valid alias targets.
    pub fn self_check(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for name in self
            .entries
            .iter()
            .map(|e| &e.name)
            .chain(self.aliases.iter().map(|a| &a.name))
        {
            if !seen.insert(name.to_lowercase()) {
                return Err(Error::CatalogInvariant {
                    name: name.clone(),
                    reason: "duplicate name".into(),
                });
            }
        }
        for entry in &self.entries {
            entry.check()?;
        }
        for alias in &self.aliases {
            if self.entry(&alias.target).is_none() {
                return Err(Error::CatalogInvariant {
                    name: alias.name.clone(),
                    reason: format!("alias target `{}` is not an entry", alias.target),
                });
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn aliases(&self) -> &[Alias] {
        &self.aliases
    }

    /// Entry names in catalog order.
    pub fn list(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    fn entry(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name.eq_ignore_ascii_case(name))
    }

    /// Entry by name (case-insensitive), not following aliases.
    pub fn get(&self, name: &str) -> Result<&CatalogEntry> {
        self.entry(name).ok_or_else(|| self.unknown(name))
    }

    /// Entry or alias by name (case-insensitive).
    pub fn resolve(&self, name: &str) -> Result<Resolved<'_>> {
        if let Some(entry) = self.entry(name) {
            return Ok(Resolved { entry, alias: None });
        }
        let alias = self
            .aliases
            .iter()
            .find(|a| a.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| self.unknown(name))?;
        Ok(Resolved {
            entry: self.get(&alias.target)?,
            alias: Some(alias),
        })
    }

    fn unknown(&self, name: &str) -> Error {
        let wanted = name.to_lowercase();
        let mut scored: Vec<(f64, &str)> = self
            .entries
            .iter()
            .map(|e| e.name.as_str())
            .chain(self.aliases.iter().map(|a| a.name.as_str()))
            .map(|n| (strsim::jaro_winkler(&wanted, &n.to_lowercase()), n))
            .filter(|(score, _)| *score >= 0.75)
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
        Error::UnknownEntry {
            name: name.to_string(),
            suggestions: scored.into_iter().take(3).map(|(_, n)| n.to_string()).collect(),
        }
    }

    /// First entry preference-equivalent to `s`.
    pub fn find_equivalent(&self, s: &PreferenceStructure) -> Option<&CatalogEntry> {
        self.entries
            .iter()
            .find(|e| pref_equivalent(&e.structure, s).unwrap_or(false))
    }
}

fn parse_atoms(tokens: &[String]) -> Result<Vec<Atom>> {
    tokens.iter().map(|t| t.parse()).collect()
}

fn build_entry(raw: RawEntry) -> Result<CatalogEntry> {
    let context = |e: Error| Error::CatalogInvariant {
        name: raw.name.clone(),
        reason: e.to_string(),
    };
    let structure = match (&raw.structure, &raw.marks) {
        (Some(s), _) => s.clone().into_structure().map_err(context)?,
        (None, Some(marks)) => {
            let atoms = parse_atoms(raw.atoms.as_deref().unwrap_or_default()).map_err(context)?;
            from_marks(&MarkTable::new(atoms, marks.clone()).map_err(context)?).map_err(context)?
        }
        (None, None) => {
            return Err(Error::CatalogInvariant {
                name: raw.name,
                reason: "entry needs a structure or marks".into(),
            })
        }
    }
    .named(raw.name.clone());
    let mark_table = match &raw.marks {
        Some(marks) => {
            let atoms = match (&raw.atoms, &raw.structure) {
                (Some(a), _) => parse_atoms(a),
                (None, Some(s)) => parse_atoms(&s.atoms),
                (None, None) => unreachable!(),
            }
            .map_err(context)?;
            MarkTable::new(atoms, marks.clone()).map_err(context)?
        }
        None => structure.to_marks(),
    };
    let (equation, equation_given) = match &raw.equation {
        Some(text) => (parse_equation(text).map_err(context)?, true),
        None => (compile_equation(&structure).map_err(context)?, false),
    };
    Ok(CatalogEntry {
        name: raw.name,
        description: raw.description,
        provenance: raw.provenance,
        equation,
        equation_given,
        structure,
        mark_table,
        weight_mode: raw.weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads_and_checks() {
        let c = Catalog::builtin().unwrap();
        for name in [
            "CE", "CEUnl", "CPO", "ORPO", "SimPO", "DPO", "DPOP", "unCPO", "cCPO", "qfUNL", "cfUNL", "sCE", "l3", "l5",
            "l14", "l20", "bCE", "cUnl", "fUnl",
        ] {
            assert!(c.get(name).is_ok(), "{name}");
        }
    }

    #[test]
    fn equations() {
        let c = Catalog::builtin().unwrap();
        assert_eq!(
            c.get("DPO").unwrap().equation.to_string(),
            "p(theta,yw) * p(ref,yl) / (p(theta,yl) * p(ref,yw))"
        );
        assert_eq!(
            c.get("cfUNL").unwrap().equation.to_string(),
            "(1 - p(theta,yl)) / ((1 - p(theta,yw)) * p(theta,yl))"
        );
        let ceunl = c.get("CEUnl").unwrap();
        assert_eq!(ceunl.structure.p().to_string(), "(and theta:yw (not theta:yl))");
        assert!(ceunl.structure.pc().is_tautology() && ceunl.structure.pa().is_unsatisfiable());
        assert!(!c.get("l5").unwrap().equation_given);
    }

    #[test]
    fn names_are_case_insensitive_with_suggestions() {
        let c = Catalog::builtin().unwrap();
        assert_eq!(c.get("dpo").unwrap().name, "DPO");
        match c.get("DPOO") {
            Err(Error::UnknownEntry { suggestions, .. }) => assert_eq!(suggestions[0], "DPO"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn aliases() {
        let c = Catalog::builtin().unwrap();
        let ipo = c.resolve("IPO").unwrap();
        assert_eq!(ipo.entry.name, "DPO");
        assert_eq!(ipo.f_kind(), Some(FKind::Squared));
        assert_eq!(c.resolve("slic").unwrap().f_kind(), Some(FKind::Margin));
        assert!(c.resolve("RRHF").unwrap().fuzzy());
        assert!(c.get("IPO").is_err());
    }

    #[test]
    fn invariant_violation_detected() {
        let bad = r#"{"entries": [{"name": "X", "equation": "p(theta,yw) / p(theta,yl)",
            "structure": {"atoms": ["theta:yw", "theta:yl"], "P": "theta:yw", "PC": "true", "PA": "false"}}]}"#;
        assert!(matches!(Catalog::from_json(bad), Err(Error::CatalogInvariant { .. })));
    }

    #[test]
    fn equivalents_found() {
        let c = Catalog::builtin().unwrap();
        let cpo = &c.get("CPO").unwrap().structure;
        assert_eq!(c.find_equivalent(cpo).unwrap().name, "CPO");
    }
}
