use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{Atom, Model, Role};

/// Weights are clamped into `[EPS, 1 - EPS]` before use.
pub const EPS: f64 = 1e-12;

pub fn clamp_probability(p: f64) -> f64 {
    p.clamp(EPS, 1.0 - EPS)
}

/// Probability assigned to each atom.
///
/// A copy atom without its own entry resolves to its base atom's weight.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightMap {
    weights: BTreeMap<Atom, f64>,
}

impl WeightMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, atom: Atom, p: f64) -> Result<()> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidWeight {
                atom: atom.to_string(),
                value: p,
            });
        }
        self.weights.insert(atom, p);
        Ok(())
    }

    pub fn with(mut self, atom: Atom, p: f64) -> Result<Self> {
        self.insert(atom, p)?;
        Ok(self)
    }

    pub fn from_pairs<I: IntoIterator<Item = (Atom, f64)>>(pairs: I) -> Result<Self> {
        pairs.into_iter().try_fold(WeightMap::new(), |m, (a, p)| m.with(a, p))
    }

    /// Parse a JSON object keyed by atom tokens, e.g. `{"theta:yw": 0.6}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, f64> = serde_json::from_str(text)?;
        raw.into_iter()
            .try_fold(WeightMap::new(), |m, (k, p)| m.with(k.parse()?, p))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("weight maps always serialize")
    }

    /// The explicit entry for `atom`, if any, unclamped.
    pub fn raw(&self, atom: &Atom) -> Option<f64> {
        self.weights.get(atom).copied()
    }

    /// Clamped weight, falling back to the base atom for copies.
    pub fn get(&self, atom: &Atom) -> Result<f64> {
        self.weights
            .get(atom)
            .or_else(|| atom.is_copy().then(|| self.weights.get(&atom.base())).flatten())
            .map(|&p| clamp_probability(p))
            .ok_or_else(|| Error::MissingWeight(atom.to_string()))
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.get(atom).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, f64)> {
        self.weights.iter().map(|(a, &p)| (a, p))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Weights per atom of `order`, clamped; errors on the first missing atom.
    pub fn resolve(&self, order: &[Atom]) -> Result<Vec<f64>> {
        order.iter().map(|a| self.get(a)).collect()
    }

    /// Add the manual-reference weights encoding a margin `gamma ≥ 0`:
    /// `mref:yw = 0.5` and `mref:yl = 0.5 / exp(gamma)`.
    pub fn with_simpo_margin(mut self, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("margin must be ≥ 0, got {gamma}")));
        }
        self.insert(Atom::mref(Role::Winner), 0.5)?;
        self.insert(Atom::mref(Role::Loser), 0.5 / gamma.exp())?;
        Ok(self)
    }

    /// Gate the squared-winner penalty: when `ref:yw ≤ theta:yw`, set the
    /// copies `theta:yw:2` and `ref:yw:2` to 1 so the penalty term vanishes.
    pub fn with_dpop_max_gate(mut self) -> Result<Self> {
        let reference = self.get(&Atom::reference(Role::Winner))?;
        let policy = self.get(&Atom::theta(Role::Winner))?;
        if reference <= policy {
            self.insert(Atom::with_copy(Model::Theta, Role::Winner, 2), 1.0)?;
            self.insert(Atom::with_copy(Model::Ref, Role::Winner, 2), 1.0)?;
        }
        Ok(self)
    }
}
