use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The model whose prediction an atom stands for.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Model {
    /// The policy being trained.
    Theta,
    /// A frozen reference model.
    Ref,
    /// A manually defined reference that simulates a fixed margin.
    Mref,
    User(String),
}

impl Model {
    fn rank(&self) -> u8 {
        match self {
            Model::Theta => 0,
            Model::Ref => 1,
            Model::Mref => 2,
            Model::User(_) => 3,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Model::Theta => "theta",
            Model::Ref => "ref",
            Model::Mref => "mref",
            Model::User(name) => name,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "theta" => Ok(Model::Theta),
            "ref" => Ok(Model::Ref),
            "mref" => Ok(Model::Mref),
            other if is_identifier(other) => Ok(Model::User(other.to_string())),
            other => Err(Error::InvalidAtom(other.to_string())),
        }
    }
}

impl Ord for Model {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Model::User(a), Model::User(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Model {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Winner or loser output of a preference pair. Winners sort first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Winner,
    Loser,
}

impl Role {
    pub fn token(self) -> &'static str {
        match self {
            Role::Winner => "yw",
            Role::Loser => "yl",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "yw" => Ok(Role::Winner),
            "yl" => Ok(Role::Loser),
            other => Err(Error::InvalidAtom(other.to_string())),
        }
    }
}

/// A probabilistic prediction: "model `model` deems output `role` valid".
///
/// `copy > 1` marks a duplicate variable introduced to keep a polynomial
/// multilinear. Atoms order canonically by model (theta, then its copies,
/// ref, ref copies, mref, user models alphabetically), then role, then copy.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub model: Model,
    pub role: Role,
    pub copy: u32,
}

impl Atom {
    pub fn new(model: Model, role: Role) -> Self {
        Atom { model, role, copy: 1 }
    }

    pub fn with_copy(model: Model, role: Role, copy: u32) -> Self {
        assert!(copy >= 1, "copy index starts at 1");
        Atom { model, role, copy }
    }

    pub fn theta(role: Role) -> Self {
        Atom::new(Model::Theta, role)
    }

    pub fn reference(role: Role) -> Self {
        Atom::new(Model::Ref, role)
    }

    pub fn mref(role: Role) -> Self {
        Atom::new(Model::Mref, role)
    }

    pub fn is_copy(&self) -> bool {
        self.copy > 1
    }

    /// The copy-1 atom this one duplicates.
    pub fn base(&self) -> Atom {
        Atom::new(self.model.clone(), self.role)
    }

    pub fn is_reference(&self) -> bool {
        matches!(self.model, Model::Ref)
    }

    fn sort_key(&self) -> (&Model, bool, Role, u32) {
        (&self.model, self.is_copy(), self.role, self.copy)
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.model.name(), self.role.token())?;
        if self.copy > 1 {
            write!(f, ":{}", self.copy)?;
        }
        Ok(())
    }
}

impl FromStr for Atom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidAtom(s.to_string());
        let mut parts = s.split(':');
        let model = Model::parse(parts.next().ok_or_else(bad)?).map_err(|_| bad())?;
        let role = Role::parse(parts.next().ok_or_else(bad)?).map_err(|_| bad())?;
        let copy = match parts.next() {
            None => 1,
            Some(c) => c.parse::<u32>().ok().filter(|&c| c >= 1).ok_or_else(bad)?,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Atom { model, role, copy })
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Sort and dedupe atoms into canonical order.
pub fn canonical_order<I: IntoIterator<Item = Atom>>(atoms: I) -> Vec<Atom> {
    let mut atoms: Vec<Atom> = atoms.into_iter().collect();
    atoms.sort();
    atoms.dedup();
    atoms
}
