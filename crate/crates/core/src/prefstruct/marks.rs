use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{canonical_order, check_atom_count, formula_of, Atom, Bits, TruthTable};

use super::{implication_form, PreferenceStructure};

/// Four-valued mark of one truth-table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mark {
    Blank,
    Check,
    Cross,
    Both,
}

impl Mark {
    pub fn new(check: bool, cross: bool) -> Mark {
        match (check, cross) {
            (false, false) => Mark::Blank,
            (true, false) => Mark::Check,
            (false, true) => Mark::Cross,
            (true, true) => Mark::Both,
        }
    }

    pub fn is_check(self) -> bool {
        matches!(self, Mark::Check | Mark::Both)
    }

    pub fn is_cross(self) -> bool {
        matches!(self, Mark::Cross | Mark::Both)
    }

    pub fn name(self) -> &'static str {
        match self {
            Mark::Blank => "blank",
            Mark::Check => "check",
            Mark::Cross => "cross",
            Mark::Both => "both",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Mark::Blank => "",
            Mark::Check => "✓",
            Mark::Cross => "✗",
            Mark::Both => "✓✗",
        }
    }
}

impl std::str::FromStr for Mark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mark> {
        match s {
            "blank" => Ok(Mark::Blank),
            "check" => Ok(Mark::Check),
            "cross" => Ok(Mark::Cross),
            "both" => Ok(Mark::Both),
            other => Err(Error::InvalidMarks(format!("unknown mark `{other}`"))),
        }
    }
}

/// One mark per truth-table row, rows in order `0..2^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkTable {
    pub atoms: Vec<Atom>,
    pub marks: Vec<Mark>,
}

impl MarkTable {
    pub fn new(atoms: Vec<Atom>, marks: Vec<Mark>) -> Result<Self> {
        check_atom_count(atoms.len())?;
        if canonical_order(atoms.iter().cloned()) != atoms {
            return Err(Error::InvalidMarks(
                "atoms must be distinct and in canonical order".into(),
            ));
        }
        if marks.len() != 1 << atoms.len() {
            return Err(Error::InvalidMarks(format!(
                "{} marks given for {} atoms (expected {})",
                marks.len(),
                atoms.len(),
                1usize << atoms.len()
            )));
        }
        Ok(MarkTable { atoms, marks })
    }

    pub fn from_sets(atoms: Vec<Atom>, check: &Bits, cross: &Bits) -> MarkTable {
        let marks = (0..check.len())
            .map(|r| Mark::new(check.get(r), cross.get(r)))
            .collect();
        MarkTable { atoms, marks }
    }

    /// Marks given by row label, e.g. `[("TT", Mark::Both), ...]`; unlisted rows are blank.
    pub fn from_labels(atoms: Vec<Atom>, labels: &[(&str, Mark)]) -> Result<Self> {
        let n = atoms.len();
        let mut marks = vec![Mark::Blank; 1 << n];
        for (label, mark) in labels {
            if label.len() != n || !label.chars().all(|c| c == 'T' || c == 'F') {
                return Err(Error::InvalidMarks(format!("bad row label `{label}`")));
            }
            let row = label.chars().fold(0, |acc, c| (acc << 1) | usize::from(c == 'T'));
            marks[row] = *mark;
        }
        MarkTable::new(atoms, marks)
    }

    pub fn check(&self) -> Bits {
        Bits::from_rows(self.marks.len(), self.rows_where(Mark::is_check))
    }

    pub fn cross(&self) -> Bits {
        Bits::from_rows(self.marks.len(), self.rows_where(Mark::is_cross))
    }

    fn rows_where(&self, pred: fn(Mark) -> bool) -> Vec<usize> {
        (0..self.marks.len()).filter(|&r| pred(self.marks[r])).collect()
    }

    pub fn get(&self, label: &str) -> Option<Mark> {
        (0..self.marks.len())
            .find(|&r| TruthTable::row_label(r, self.atoms.len()) == label)
            .map(|r| self.marks[r])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mark tables always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MarkTable = serde_json::from_str(text)?;
        MarkTable::new(raw.atoms, raw.marks)
    }
}

/// Rows are listed from all-true down to all-false.
impl fmt::Display for MarkTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.atoms.len();
        let header: Vec<String> = self.atoms.iter().map(Atom::to_string).collect();
        writeln!(f, "{} | mark", header.join(" "))?;
        for row in (0..self.marks.len()).rev() {
            let cells: Vec<String> = (0..n)
                .map(|j| {
                    let v = if (row >> (n - 1 - j)) & 1 == 1 { "T" } else { "F" };
                    format!("{v:<width$}", width = header[j].len())
                })
                .collect();
            write!(f, "{} | {}", cells.join(" "), self.marks[row].name())?;
            if row > 0 {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Rebuild a structure from marks: `Pw` from the check rows, `Pl` from the
/// cross rows, then the implication form.
pub fn from_marks(m: &MarkTable) -> Result<PreferenceStructure> {
    let pw = formula_of(&TruthTable::new(m.atoms.clone(), m.check())?);
    let pl = formula_of(&TruthTable::new(m.atoms.clone(), m.cross())?);
    let mut s = implication_form(&pw, &pl)?;
    if s.atoms() != m.atoms.as_slice() {
        s = s.extend_to(&m.atoms)?;
    }
    Ok(s)
}
