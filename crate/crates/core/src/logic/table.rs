use std::fmt;

use crate::error::{Error, Result};
use crate::logic::atom::Atom;

/// Hard cap on atoms for any truth table.
pub const MAX_ATOMS: usize = 16;

/// Fixed-width bit set with one bit per truth-table row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    rows: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn empty(rows: usize) -> Self {
        Bits {
            rows,
            words: vec![0; rows.div_ceil(64).max(1)],
        }
    }

    pub fn full(rows: usize) -> Self {
        let mut bits = Bits {
            rows,
            words: vec![u64::MAX; rows.div_ceil(64).max(1)],
        };
        bits.trim();
        bits
    }

    pub fn from_rows<I: IntoIterator<Item = usize>>(rows: usize, set: I) -> Self {
        let mut bits = Bits::empty(rows);
        for row in set {
            bits.set(row, true);
        }
        bits
    }

    /// Build from the low `rows` bits of a machine word (rows ≤ 64).
    pub fn from_word(rows: usize, word: u64) -> Self {
        assert!(rows <= 64);
        let mut bits = Bits {
            rows,
            words: vec![word],
        };
        bits.trim();
        bits
    }

    /// The low 64 rows as a word.
    pub fn low_word(&self) -> u64 {
        self.words[0]
    }

    fn trim(&mut self) {
        let tail = self.rows % 64;
        if tail != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << tail) - 1;
        } else if self.rows == 0 {
            self.words[0] = 0;
        }
    }

    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn get(&self, row: usize) -> bool {
        debug_assert!(row < self.rows);
        self.words[row / 64] >> (row % 64) & 1 == 1
    }

    pub fn set(&mut self, row: usize, value: bool) {
        assert!(row < self.rows, "row {row} out of range for {} rows", self.rows);
        let mask = 1u64 << (row % 64);
        if value {
            self.words[row / 64] |= mask;
        } else {
            self.words[row / 64] &= !mask;
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn none(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn all(&self) -> bool {
        *self == Bits::full(self.rows)
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        self.zip_check(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn and(&self, other: &Bits) -> Bits {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Bits) -> Bits {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn and_not(&self, other: &Bits) -> Bits {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn not(&self) -> Bits {
        let mut out = Bits {
            rows: self.rows,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.trim();
        out
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + bit)
                }
            })
        })
    }

    fn zip_check(&self, other: &Bits) {
        assert_eq!(self.rows, other.rows, "bit sets over different row counts");
    }

    fn zip_with(&self, other: &Bits, op: impl Fn(u64, u64) -> u64) -> Bits {
        self.zip_check(other);
        let mut out = Bits {
            rows: self.rows,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect(),
        };
        out.trim();
        out
    }

    /// Lowercase hex, most significant row first.
    pub fn to_hex(&self) -> String {
        let digits = self.rows.div_ceil(4).max(1);
        let mut out = String::with_capacity(digits + 2);
        out.push_str("0x");
        for d in (0..digits).rev() {
            let mut nibble = 0u8;
            for b in 0..4 {
                let row = d * 4 + b;
                if row < self.rows && self.get(row) {
                    nibble |= 1 << b;
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ones()).finish()
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bits {
    /// Numeric order of the row bitmask, high rows most significant.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rows
            .cmp(&other.rows)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

/// Truth value of atom `index` (of `n`) in assignment `row`.
///
/// The first atom is the most significant bit of the row index.
#[inline]
pub fn atom_value(row: usize, index: usize, n: usize) -> bool {
    row >> (n - 1 - index) & 1 == 1
}

/// Rows where atom `index` is true.
pub fn atom_column(index: usize, n: usize) -> Bits {
    let rows = 1usize << n;
    Bits::from_rows(rows, (0..rows).filter(|&r| atom_value(r, index, n)))
}

pub fn check_atom_count(count: usize) -> Result<()> {
    if count > MAX_ATOMS {
        Err(Error::TooManyAtoms {
            count,
            limit: MAX_ATOMS,
            what: "truth tables",
        })
    } else {
        Ok(())
    }
}

/// The set of satisfying assignments of a formula over an ordered atom list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    atoms: Vec<Atom>,
    bits: Bits,
}

impl TruthTable {
    pub fn new(atoms: Vec<Atom>, bits: Bits) -> Result<Self> {
        check_atom_count(atoms.len())?;
        if bits.len() != 1 << atoms.len() {
            return Err(Error::InvalidArgument(format!(
                "{} bits given for {} atoms",
                bits.len(),
                atoms.len()
            )));
        }
        Ok(TruthTable { atoms, bits })
    }

    pub fn from_rows<I: IntoIterator<Item = usize>>(atoms: Vec<Atom>, rows: I) -> Result<Self> {
        check_atom_count(atoms.len())?;
        let n = 1usize << atoms.len();
        let rows: Vec<usize> = rows.into_iter().collect();
        if let Some(bad) = rows.iter().find(|&&r| r >= n) {
            return Err(Error::InvalidArgument(format!("row {bad} out of range")));
        }
        let bits = Bits::from_rows(n, rows);
        Ok(TruthTable { atoms, bits })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn rows(&self) -> usize {
        self.bits.len()
    }

    pub fn satisfies(&self, row: usize) -> bool {
        self.bits.get(row)
    }

    /// Re-express this table over `target`, which must contain every atom of `self`.
    pub fn extend_to(&self, target: &[Atom]) -> Result<TruthTable> {
        Ok(TruthTable {
            atoms: target.to_vec(),
            bits: remap_bits(&self.bits, &self.atoms, target)?,
        })
    }

    /// Human-readable row label such as `TF` for the given row.
    pub fn row_label(row: usize, n: usize) -> String {
        (0..n).map(|j| if atom_value(row, j, n) { 'T' } else { 'F' }).collect()
    }
}

/// Permute/extend a bit set over `from` atoms to the `to` atom order.
pub fn remap_bits(bits: &Bits, from: &[Atom], to: &[Atom]) -> Result<Bits> {
    check_atom_count(to.len())?;
    if from == to {
        return Ok(bits.clone());
    }
    let positions: Vec<usize> = from
        .iter()
        .map(|a| {
            to.iter()
                .position(|b| b == a)
                .ok_or_else(|| Error::UndeclaredAtom(a.to_string()))
        })
        .collect::<Result<_>>()?;
    let (n, m) = (from.len(), to.len());
    let rows = 1usize << m;
    let mut out = Bits::empty(rows);
    for row in 0..rows {
        let mut old = 0usize;
        for (j, &p) in positions.iter().enumerate() {
            if atom_value(row, p, m) {
                old |= 1 << (n - 1 - j);
            }
        }
        if bits.get(old) {
            out.set(row, true);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(tokens: &[&str]) -> Vec<Atom> {
        tokens.iter().map(|t| t.parse().unwrap()).collect()
    }

    #[test]
    fn row_layout_is_msb_first() {
        // [W, L]: row 2 = W true, L false
        assert!(atom_value(2, 0, 2));
        assert!(!atom_value(2, 1, 2));
        assert_eq!(TruthTable::row_label(2, 2), "TF");
        assert_eq!(TruthTable::row_label(1, 2), "FT");
        assert_eq!(atom_column(0, 2), Bits::from_rows(4, [2, 3]));
    }

    #[test]
    fn bit_ops_respect_width() {
        let a = Bits::from_rows(4, [0, 3]);
        assert_eq!(a.not(), Bits::from_rows(4, [1, 2]));
        assert_eq!(a.not().not(), a);
        assert!(Bits::empty(4).is_subset(&a));
        assert!(Bits::full(4).all());
        assert_eq!(Bits::full(4).count(), 4);
        let wide = Bits::from_rows(256, [0, 70, 255]);
        assert_eq!(wide.ones().collect::<Vec<_>>(), vec![0, 70, 255]);
        assert_eq!(wide.not().count(), 253);
    }

    #[test]
    fn hex_is_msb_first() {
        assert_eq!(Bits::from_rows(4, [0, 1, 3]).to_hex(), "0xb");
        assert_eq!(Bits::from_rows(16, [15]).to_hex(), "0x8000");
    }

    #[test]
    fn remap_adds_unused_atom() {
        // W over [W]; extend to [W, L] and to [L, W]
        let bits = Bits::from_rows(2, [1]);
        let wl = remap_bits(&bits, &atoms(&["theta:yw"]), &atoms(&["theta:yw", "theta:yl"])).unwrap();
        assert_eq!(wl, Bits::from_rows(4, [2, 3]));
        let lw = remap_bits(&bits, &atoms(&["theta:yw"]), &atoms(&["theta:yl", "theta:yw"])).unwrap();
        assert_eq!(lw, Bits::from_rows(4, [1, 3]));
    }

    #[test]
    fn atom_cap_enforced() {
        let many: Vec<Atom> = (1..=17).map(|c| format!("theta:yw:{c}").parse().unwrap()).collect();
        assert!(matches!(
            TruthTable::from_rows(many, []),
            Err(Error::TooManyAtoms { count: 17, .. })
        ));
    }
}
