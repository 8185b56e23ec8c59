//! Symbolic toolkit for direct preference alignment losses.
//!
//! Loss equations (log-ratios of disjoint multilinear polynomials over model
//! prediction probabilities) are decompiled into preference structures of
//! propositional formulas, and structures are compiled back into equations by
//! weighted model counting. The crate also covers preference entailment,
//! lattice enumeration between two structures, and the R-product fuzzy
//! relaxation.

pub mod catalog;
pub mod decompile;
pub mod error;
pub mod lattice;
pub mod logic;
pub mod poly;
pub mod prefstruct;
pub mod semantics;

pub use error::{Error, Result};
