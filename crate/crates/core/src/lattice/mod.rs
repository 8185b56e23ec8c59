//! Structures between two entailment bounds and their Hasse diagram.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::catalog::Catalog;
use crate::decompile::reference_from_pair;
use crate::error::{Error, Result};
use crate::logic::{formula_of, minimize_or_keep, union_atoms, Bits, Formula, TruthTable};
use crate::prefstruct::{from_marks, implication_view, pref_entails, MarkTable, PreferenceStructure};

/// Largest atom count for exhaustive enumeration.
pub const MAX_LATTICE_ATOMS: usize = 4;
/// Largest number of candidates enumerated before giving up.
pub const MAX_CANDIDATES: u128 = 1 << 20;

#[derive(Debug, Clone)]
pub struct LatticeSpec {
    pub lower: PreferenceStructure,
    pub upper: PreferenceStructure,
    pub nontrivial_only: bool,
}

impl LatticeSpec {
    pub fn new(lower: PreferenceStructure, upper: PreferenceStructure) -> Self {
        LatticeSpec {
            lower,
            upper,
            nontrivial_only: false,
        }
    }

    pub fn nontrivial(mut self) -> Self {
        self.nontrivial_only = true;
        self
    }
}

fn subsets_between(low: &Bits, high: &Bits) -> Vec<Bits> {
    let free: Vec<usize> = high.and_not(low).ones().collect();
    (0u64..1 << free.len())
        .map(|mask| {
            let mut b = low.clone();
            for (i, &row) in free.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    b.set(row, true);
                }
            }
            b
        })
        .collect()
}

/// Number of `(check, cross)` candidates between the bounds.
pub fn interval_size(spec: &LatticeSpec) -> Result<u128> {
    let atoms = union_atoms(spec.lower.atoms(), spec.upper.atoms());
    let (lo, hi) = (spec.lower.extend_to(&atoms)?, spec.upper.extend_to(&atoms)?);
    let free = hi.check().and_not(&lo.check()).count() + lo.cross().and_not(&hi.cross()).count();
    Ok(if free >= 127 { u128::MAX } else { 1u128 << free })
}

/// Every structure `s` with `lower ⊑ s ⊑ upper`, one per `(check, cross)`
/// pair, ordered by check then cross bitmask.
pub fn enumerate_between(spec: &LatticeSpec) -> Result<Vec<PreferenceStructure>> {
    let atoms = union_atoms(spec.lower.atoms(), spec.upper.atoms());
    if atoms.len() > MAX_LATTICE_ATOMS {
        return Err(Error::TooManyAtoms {
            count: atoms.len(),
            limit: MAX_LATTICE_ATOMS,
            what: "lattice enumeration",
        });
    }
    if !pref_entails(&spec.lower, &spec.upper)? {
        return Err(Error::BoundViolation);
    }
    let size = interval_size(spec)?;
    if size > MAX_CANDIDATES {
        return Err(Error::EnumerationTooLarge(size));
    }
    let (lo, hi) = (spec.lower.extend_to(&atoms)?, spec.upper.extend_to(&atoms)?);
    let checks = subsets_between(&lo.check(), &hi.check());
    let crosses = subsets_between(&hi.cross(), &lo.cross());
    let mut out = Vec::new();
    let mut keys = Vec::new();
    for check in &checks {
        for cross in &crosses {
            if spec.nontrivial_only && (check.none() || cross.none() || check == cross) {
                continue;
            }
            keys.push((check.clone(), cross.clone()));
        }
    }
    keys.sort();
    for (check, cross) in keys {
        let s = from_marks(&MarkTable::from_sets(atoms.clone(), &check, &cross))?;
        debug_assert!(pref_entails(&lo, &s)? && pref_entails(&s, &hi)?);
        out.push(s);
    }
    Ok(out)
}

/// Covering pairs `(i, j)` of strict preference entailment: `s_i ⊏ s_j`
/// with nothing strictly between.
pub fn hasse(structures: &[PreferenceStructure]) -> Result<Vec<(usize, usize)>> {
    let n = structures.len();
    let atoms = structures
        .iter()
        .fold(Vec::new(), |acc, s| union_atoms(&acc, s.atoms()));
    let wide = structures
        .iter()
        .map(|s| s.extend_to(&atoms))
        .collect::<Result<Vec<_>>>()?;
    let sets: Vec<(Bits, Bits)> = wide.iter().map(|s| (s.check(), s.cross())).collect();
    let le = |i: usize, j: usize| sets[i].0.is_subset(&sets[j].0) && sets[j].1.is_subset(&sets[i].1);
    let lt = |i: usize, j: usize| le(i, j) && sets[i] != sets[j];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if lt(i, j) && !(0..n).any(|k| lt(i, k) && lt(k, j)) {
                edges.push((i, j));
            }
        }
    }
    Ok(edges)
}

/// `(check, cross)` bitmasks as hex, e.g. `0x4/0x3`.
pub fn node_key(s: &PreferenceStructure) -> String {
    format!("{}/{}", s.check().to_hex(), s.cross().to_hex())
}

/// The core formula shared by every structure with these marks: `¬cross ∨ check`.
pub fn semantic_region(s: &PreferenceStructure) -> Result<Formula> {
    let bits = s.cross().not().or(&s.check());
    let f = formula_of(&TruthTable::new(s.atoms().to_vec(), bits)?);
    let f = minimize_or_keep(&f);
    Formula::with_atoms(implication_view(f.expr()), s.atoms())
}

/// Node label: catalog name when one is equivalent, otherwise the bitmask key.
pub fn label(s: &PreferenceStructure, catalog: Option<&Catalog>) -> String {
    catalog
        .and_then(|c| c.find_equivalent(s))
        .map(|e| e.name.clone())
        .or_else(|| s.name.clone())
        .unwrap_or_else(|| node_key(s))
}

fn quote(text: &str) -> String {
    format!("\"{}\"", text.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph with one cluster per semantic region.
pub fn export_dot(
    structures: &[PreferenceStructure],
    edges: &[(usize, usize)],
    catalog: Option<&Catalog>,
) -> Result<String> {
    let mut regions: BTreeMap<(Bits, String), Vec<usize>> = BTreeMap::new();
    for (i, s) in structures.iter().enumerate() {
        let region = semantic_region(s)?;
        regions
            .entry((region.bits().clone(), region.to_string()))
            .or_default()
            .push(i);
    }
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=box];\n");
    for (c, ((_, formula), members)) in regions.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{c} {{");
        let _ = writeln!(out, "    label={};", quote(formula));
        for &i in members {
            let _ = writeln!(out, "    n{i} [label={}];", quote(&label(&structures[i], catalog)));
        }
        out.push_str("  }\n");
    }
    for (i, j) in edges {
        let _ = writeln!(out, "  n{i} -> n{j};");
    }
    out.push_str("}\n");
    Ok(out)
}

/// Reference form of each structure, rebuilt from its check and cross sets.
pub fn reference_forms(structures: &[PreferenceStructure]) -> Result<Vec<PreferenceStructure>> {
    structures
        .iter()
        .map(|s| {
            let pw = formula_of(&TruthTable::new(s.atoms().to_vec(), s.check())?);
            let pl = formula_of(&TruthTable::new(s.atoms().to_vec(), s.cross())?);
            let mut r = reference_from_pair(&pw, &pl)?.structure;
            r.name = s.name.as_ref().map(|n| format!("ref-{n}"));
            Ok(r)
        })
        .collect()
}
