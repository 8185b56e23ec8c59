//! Exact two-level (sum-of-products) minimization.
//!
//! Prime implicants are found by enumerating all `3^n` cubes, and a minimum
//! cover is chosen by branch and bound. Ties are broken by total literal count
//! and then by the lexicographically smallest sorted implicant list, where an
//! implicant's key lists each atom (in canonical order) as absent < positive <
//! negative. The same key orders the terms of the printed disjunction.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::logic::atom::Atom;
use crate::logic::formula::{Expr, Formula};
use crate::logic::table::{atom_value, Bits, TruthTable};

/// Largest atom count accepted by [`minimize`].
pub const MAX_MINIMIZE_ATOMS: usize = 6;

/// A product term over row-index bits: rows `r` with `r & care == value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cube {
    pub care: u32,
    pub value: u32,
}

impl Cube {
    pub fn universe() -> Cube {
        Cube { care: 0, value: 0 }
    }

    pub fn minterm(row: usize, n: usize) -> Cube {
        let all = if n == 0 { 0 } else { (1u32 << n) - 1 };
        Cube {
            care: all,
            value: row as u32,
        }
    }

    pub fn contains_row(&self, row: usize) -> bool {
        row as u32 & self.care == self.value
    }

    pub fn num_literals(&self) -> u32 {
        self.care.count_ones()
    }

    /// `(atom index, polarity)` pairs in atom order.
    pub fn literals(&self, n: usize) -> Vec<(usize, bool)> {
        (0..n)
            .filter_map(|j| {
                let bit = 1u32 << (n - 1 - j);
                (self.care & bit != 0).then_some((j, self.value & bit != 0))
            })
            .collect()
    }

    /// Per-atom key: 0 absent, 1 positive, 2 negative.
    pub fn key(&self, n: usize) -> Vec<u8> {
        (0..n)
            .map(|j| {
                let bit = 1u32 << (n - 1 - j);
                match (self.care & bit != 0, self.value & bit != 0) {
                    (false, _) => 0,
                    (true, true) => 1,
                    (true, false) => 2,
                }
            })
            .collect()
    }

    pub fn rows(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (0..1usize << n).filter(move |&r| self.contains_row(r))
    }

    pub fn is_disjoint(&self, other: &Cube) -> bool {
        let shared = self.care & other.care;
        (self.value ^ other.value) & shared != 0
    }

    /// `self ∖ other` as pairwise disjoint cubes.
    pub fn sharp(&self, other: &Cube, n: usize) -> Vec<Cube> {
        if self.is_disjoint(other) {
            return vec![*self];
        }
        let mut out = Vec::new();
        let mut fixed = *self;
        for j in 0..n {
            let bit = 1u32 << (n - 1 - j);
            if other.care & bit != 0 && self.care & bit == 0 {
                let flipped = Cube {
                    care: fixed.care | bit,
                    value: fixed.value | (!other.value & bit),
                };
                out.push(flipped);
                fixed = Cube {
                    care: fixed.care | bit,
                    value: fixed.value | (other.value & bit),
                };
            }
        }
        out
    }

    pub fn to_expr(&self, atoms: &[Atom]) -> Expr {
        let lits = self
            .literals(atoms.len())
            .into_iter()
            .map(|(j, positive)| {
                let a = Expr::Atom(atoms[j].clone());
                if positive {
                    a
                } else {
                    Expr::not(a)
                }
            })
            .collect();
        Expr::and_all(lits)
    }
}

fn cmp_cover(a: &[Cube], b: &[Cube], n: usize) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| literal_total(a).cmp(&literal_total(b)))
        .then_with(|| {
            let ka: Vec<Vec<u8>> = a.iter().map(|c| c.key(n)).collect();
            let kb: Vec<Vec<u8>> = b.iter().map(|c| c.key(n)).collect();
            ka.cmp(&kb)
        })
}

fn literal_total(cover: &[Cube]) -> u32 {
    cover.iter().map(Cube::num_literals).sum()
}

fn sort_cubes(cubes: &mut [Cube], n: usize) {
    cubes.sort_by_cached_key(|c| c.key(n));
}

fn is_implicant(cube: &Cube, on: &Bits, n: usize) -> bool {
    cube.rows(n).all(|r| on.get(r))
}

/// All prime implicants of the on-set, sorted by key.
pub fn prime_implicants(on: &Bits, n: usize) -> Vec<Cube> {
    let mut primes = Vec::new();
    // each cube is encoded in base 3 per atom: 0 absent, 1 true, 2 false
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut care = 0u32;
        let mut value = 0u32;
        let mut c = code;
        for j in 0..n {
            let bit = 1u32 << (n - 1 - j);
            match c % 3 {
                1 => {
                    care |= bit;
                    value |= bit;
                }
                2 => care |= bit,
                _ => {}
            }
            c /= 3;
        }
        let cube = Cube { care, value };
        if !is_implicant(&cube, on, n) {
            continue;
        }
        let expandable = (0..n).any(|j| {
            let bit = 1u32 << j;
            care & bit != 0
                && is_implicant(
                    &Cube {
                        care: care & !bit,
                        value: value & !bit,
                    },
                    on,
                    n,
                )
        });
        if !expandable {
            primes.push(cube);
        }
    }
    sort_cubes(&mut primes, n);
    primes
}

/// A minimum sum-of-products cover of `on` (n ≤ 6), sorted by key.
pub fn minimal_cover(on: &Bits, n: usize) -> Result<Vec<Cube>> {
    if n > MAX_MINIMIZE_ATOMS {
        return Err(Error::TooManyAtoms {
            count: n,
            limit: MAX_MINIMIZE_ATOMS,
            what: "exact minimization",
        });
    }
    if on.none() {
        return Ok(Vec::new());
    }
    if on.all() {
        return Ok(vec![Cube::universe()]);
    }
    let primes = prime_implicants(on, n);
    let masks: Vec<u64> = primes.iter().map(|p| p.rows(n).fold(0u64, |m, r| m | 1 << r)).collect();
    let target = on.low_word();

    // essential primes: the only cover of some minterm
    let mut chosen: Vec<usize> = Vec::new();
    let mut covered = 0u64;
    for row in on.ones() {
        let covering: Vec<usize> = (0..primes.len()).filter(|&i| masks[i] >> row & 1 == 1).collect();
        if covering.len() == 1 && !chosen.contains(&covering[0]) {
            chosen.push(covering[0]);
            covered |= masks[covering[0]];
        }
    }

    let mut search = CoverSearch {
        primes: &primes,
        masks: &masks,
        target,
        n,
        best: None,
    };
    search.run(&mut chosen, covered);
    let mut best = search.best.expect("primes always cover the on-set");
    sort_cubes(&mut best, n);
    Ok(best)
}

struct CoverSearch<'a> {
    primes: &'a [Cube],
    masks: &'a [u64],
    target: u64,
    n: usize,
    best: Option<Vec<Cube>>,
}

impl CoverSearch<'_> {
    fn run(&mut self, chosen: &mut Vec<usize>, covered: u64) {
        let uncovered = self.target & !covered;
        if uncovered == 0 {
            let mut cover: Vec<Cube> = chosen.iter().map(|&i| self.primes[i]).collect();
            sort_cubes(&mut cover, self.n);
            let better = match &self.best {
                None => true,
                Some(best) => cmp_cover(&cover, best, self.n) == Ordering::Less,
            };
            if better {
                self.best = Some(cover);
            }
            return;
        }
        if let Some(best) = &self.best {
            if chosen.len() + 1 > best.len() {
                return;
            }
            let lits: u32 = chosen.iter().map(|&i| self.primes[i].num_literals()).sum();
            if chosen.len() + 1 == best.len() {
                let cheapest = (0..self.primes.len())
                    .filter(|&i| self.masks[i] & uncovered != 0)
                    .map(|i| self.primes[i].num_literals())
                    .min()
                    .unwrap_or(0);
                if lits + cheapest > literal_total(best) {
                    return;
                }
            }
        }
        // branch on the uncovered row with the fewest candidates
        let (_, row) = (0..64)
            .filter(|&r| uncovered >> r & 1 == 1)
            .map(|r| {
                let count = self.masks.iter().filter(|&&m| m >> r & 1 == 1).count();
                (count, r)
            })
            .min()
            .unwrap();
        for i in 0..self.primes.len() {
            if self.masks[i] >> row & 1 == 1 && !chosen.contains(&i) {
                chosen.push(i);
                self.run(chosen, covered | self.masks[i]);
                chosen.pop();
            }
        }
    }
}

/// Sum-of-products expression for a cover (false for an empty cover).
pub fn cover_expr(cover: &[Cube], atoms: &[Atom]) -> Expr {
    if cover.len() == 1 && cover[0].care == 0 {
        return Expr::True;
    }
    Expr::or_all(cover.iter().map(|c| c.to_expr(atoms)).collect())
}

/// Exact minimal sum-of-products form of `f`. Errors above six atoms.
pub fn minimize(f: &Formula) -> Result<Formula> {
    let n = f.num_atoms();
    let cover = minimal_cover(f.bits(), n)?;
    Ok(Formula::from_parts(cover_expr(&cover, f.atoms()), f.models().clone()))
}

/// Minimize when the atom count allows it, otherwise return `f` unchanged.
pub fn minimize_or_keep(f: &Formula) -> Formula {
    minimize(f).unwrap_or_else(|_| f.clone())
}

/// A formula whose models are exactly `table`: minimal SOP up to six atoms,
/// the minterm expansion beyond.
pub fn formula_of(table: &TruthTable) -> Formula {
    let n = table.num_atoms();
    let expr = match minimal_cover(table.bits(), n) {
        Ok(cover) => cover_expr(&cover, table.atoms()),
        Err(_) => minterm_expr(table),
    };
    Formula::from_parts(expr, table.clone())
}

fn minterm_expr(table: &TruthTable) -> Expr {
    let n = table.num_atoms();
    if table.bits().all() {
        return Expr::True;
    }
    let terms = table
        .bits()
        .ones()
        .map(|row| {
            Expr::and_all(
                (0..n)
                    .map(|j| {
                        let a = Expr::Atom(table.atoms()[j].clone());
                        if atom_value(row, j, n) {
                            a
                        } else {
                            Expr::not(a)
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    Expr::or_all(terms)
}

/// Split a cover into pairwise disjoint cubes, then merge adjacent pieces.
pub fn disjoint_cover(cover: &[Cube], n: usize) -> Vec<Cube> {
    let mut out: Vec<Cube> = Vec::new();
    for cube in cover {
        let mut pieces = vec![*cube];
        for prev in &out {
            pieces = pieces.iter().flat_map(|p| p.sharp(prev, n)).collect();
        }
        out.extend(pieces);
    }
    merge_adjacent(&mut out);
    sort_cubes(&mut out, n);
    out
}

fn merge_adjacent(cubes: &mut Vec<Cube>) {
    'outer: loop {
        for i in 0..cubes.len() {
            for j in i + 1..cubes.len() {
                let (a, b) = (cubes[i], cubes[j]);
                let diff = a.value ^ b.value;
                if a.care == b.care && diff.count_ones() == 1 {
                    cubes[i] = Cube {
                        care: a.care & !diff,
                        value: a.value & !diff,
                    };
                    cubes.remove(j);
                    continue 'outer;
                }
            }
        }
        break;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::formula::parse_formula;

    fn wl() -> Vec<Atom> {
        vec!["theta:yw".parse().unwrap(), "theta:yl".parse().unwrap()]
    }

    fn min_text(text: &str) -> String {
        minimize(&parse_formula(text, &wl()).unwrap()).unwrap().to_string()
    }

    #[test]
    fn absorption() {
        assert_eq!(
            min_text("(or (and theta:yw (not theta:yl)) (and theta:yw theta:yl))"),
            "theta:yw"
        );
    }

    #[test]
    fn orpo_core_formula() {
        let raw = "(implies (and theta:yl (not theta:yw)) (and theta:yw (not theta:yl)))";
        assert_eq!(min_text(raw), "(or (not theta:yl) theta:yw)");
    }

    #[test]
    fn xor_is_already_minimal() {
        assert_eq!(
            min_text("(xor theta:yw theta:yl)"),
            "(or (and theta:yw (not theta:yl)) (and (not theta:yw) theta:yl))"
        );
    }

    #[test]
    fn constants() {
        assert_eq!(min_text("(or theta:yw (not theta:yw))"), "true");
        assert_eq!(min_text("(and theta:yw (not theta:yw))"), "false");
    }

    #[test]
    fn formula_of_rows() {
        let t = TruthTable::from_rows(wl(), [2]).unwrap();
        assert_eq!(formula_of(&t).to_string(), "(and theta:yw (not theta:yl))");
        let t = TruthTable::from_rows(wl(), [0, 1, 2, 3]).unwrap();
        assert_eq!(formula_of(&t).to_string(), "true");
        let t = TruthTable::from_rows(wl(), [0, 2, 3]).unwrap();
        let f = formula_of(&t);
        assert!(f
            .equivalent(&parse_formula("(implies theta:yl theta:yw)", &wl()).unwrap())
            .unwrap());
    }

    #[test]
    fn too_many_atoms() {
        let atoms: Vec<Atom> = (1..=7).map(|c| format!("theta:yw:{c}").parse().unwrap()).collect();
        let f = Formula::with_atoms(Expr::True, &atoms).unwrap();
        assert!(matches!(minimize(&f), Err(Error::TooManyAtoms { count: 7, .. })));
        assert!(formula_of(f.models()).is_tautology());
    }

    /// Independent oracle: smallest cover found by exhaustive subset search
    /// over all implicant cubes (not just primes).
    fn brute_min_size(on: &Bits, n: usize) -> usize {
        if on.none() {
            return 0;
        }
        let cubes: Vec<u64> = (0..3usize.pow(n as u32))
            .filter_map(|code| {
                let mut mask = 0u64;
                'rows: for r in 0..1usize << n {
                    let mut c = code;
                    for j in 0..n {
                        let v = r >> (n - 1 - j) & 1;
                        match c % 3 {
                            1 if v == 0 => continue 'rows,
                            2 if v == 1 => continue 'rows,
                            _ => {}
                        }
                        c /= 3;
                    }
                    mask |= 1 << r;
                }
                (mask & !on.low_word() == 0).then_some(mask)
            })
            .collect();
        let target = on.low_word();
        for k in 1..=cubes.len() {
            if combos(&cubes, k, 0, 0, target) {
                return k;
            }
        }
        unreachable!()
    }

    fn combos(cubes: &[u64], k: usize, start: usize, acc: u64, target: u64) -> bool {
        if k == 0 {
            return acc == target;
        }
        (start..cubes.len()).any(|i| combos(cubes, k - 1, i + 1, acc | cubes[i], target))
    }

    #[test]
    fn cover_size_matches_exhaustive_oracle_n3() {
        for word in 0u64..256 {
            let on = Bits::from_word(8, word);
            let cover = minimal_cover(&on, 3).unwrap();
            assert_eq!(cover.len(), brute_min_size(&on, 3), "function {word:#x}");
            let mut rows = Bits::empty(8);
            for c in &cover {
                for r in c.rows(3) {
                    rows.set(r, true);
                }
            }
            assert_eq!(rows, on);
        }
    }

    #[test]
    fn disjoint_cover_partitions_rows() {
        for word in 0u64..(1 << 16) {
            if word % 97 != 0 {
                continue;
            }
            let on = Bits::from_word(16, word);
            let cover = minimal_cover(&on, 4).unwrap();
            let pieces = disjoint_cover(&cover, 4);
            let mut seen = Bits::empty(16);
            for p in &pieces {
                for r in p.rows(4) {
                    assert!(!seen.get(r), "overlap at row {r} for {word:#x}");
                    seen.set(r, true);
                }
            }
            assert_eq!(seen, on);
        }
    }

    #[test]
    fn uncpo_disjoint_top() {
        // check set {TT, TF, FF}
        let on = Bits::from_rows(4, [0, 2, 3]);
        let pieces = disjoint_cover(&minimal_cover(&on, 2).unwrap(), 2);
        let keys: Vec<Vec<u8>> = pieces.iter().map(|c| c.key(2)).collect();
        // (1 - L) and W·L
        assert_eq!(keys, vec![vec![0, 2], vec![1, 1]]);
    }
}
