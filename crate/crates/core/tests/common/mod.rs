#![allow(dead_code)]

use dpa_core::logic::{formula_of, Atom, Bits, Formula, TruthTable};
use dpa_core::poly::WeightMap;
use dpa_core::prefstruct::{from_marks, MarkTable, PreferenceStructure};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn atoms(names: &[&str]) -> Vec<Atom> {
    names.iter().map(|n| n.parse().unwrap()).collect()
}

pub fn pair() -> Vec<Atom> {
    atoms(&["theta:yw", "theta:yl"])
}

pub fn all_base() -> Vec<Atom> {
    atoms(&["theta:yw", "theta:yl", "ref:yw", "ref:yl", "mref:yw", "mref:yl"])
}

pub fn weights(rng: &mut ChaCha8Rng, atoms: &[Atom]) -> WeightMap {
    WeightMap::from_pairs(atoms.iter().map(|a| (a.clone(), rng.gen_range(0.001..0.999)))).unwrap()
}

pub fn bits(rng: &mut ChaCha8Rng, n: usize) -> Bits {
    let rows = 1usize << n;
    let word: u64 = rng.gen();
    Bits::from_word(rows, if rows == 64 { word } else { word & ((1u64 << rows) - 1) })
}

pub fn formula(rng: &mut ChaCha8Rng, atoms: &[Atom]) -> Formula {
    formula_of(&TruthTable::new(atoms.to_vec(), bits(rng, atoms.len())).unwrap())
}

/// Random `(P, PC, PA)` over the given atoms.
pub fn structure(rng: &mut ChaCha8Rng, atoms: &[Atom]) -> PreferenceStructure {
    let (p, pc, pa) = (formula(rng, atoms), formula(rng, atoms), formula(rng, atoms));
    PreferenceStructure::with_atoms(p, pc, pa, atoms).unwrap()
}

/// Random structure whose check and cross sets are both non-empty.
pub fn countable_structure(rng: &mut ChaCha8Rng, atoms: &[Atom]) -> PreferenceStructure {
    loop {
        let s = structure(rng, atoms);
        if !s.check().none() && !s.cross().none() {
            return s;
        }
    }
}

pub fn from_sets(atoms: &[Atom], check: &Bits, cross: &Bits) -> PreferenceStructure {
    from_marks(&MarkTable::from_sets(atoms.to_vec(), check, cross)).unwrap()
}
