use std::path::Path;

use dpa_core::catalog::{Catalog, CatalogEntry, Resolved};
use dpa_core::poly::{parse_equation, LossEquation, WeightMap};
use dpa_core::prefstruct::{from_marks, MarkTable, PreferenceStructure};
use dpa_core::{Error, Result};

/// A structure named on the command line, with its catalog entry if any.
pub struct StructureArg<'a> {
    pub structure: PreferenceStructure,
    pub resolved: Option<Resolved<'a>>,
    pub label: String,
}

impl StructureArg<'_> {
    pub fn entry(&self) -> Option<&CatalogEntry> {
        self.resolved.map(|r| r.entry)
    }
}

/// Catalog name (or alias) first, then a JSON file holding a structure or
/// a mark table.
pub fn structure<'a>(catalog: &'a Catalog, arg: &str) -> Result<StructureArg<'a>> {
    if let Ok(resolved) = catalog.resolve(arg) {
        return Ok(StructureArg {
            structure: resolved.entry.structure.clone(),
            resolved: Some(resolved),
            label: arg.to_string(),
        });
    }
    let path = Path::new(arg);
    if !path.exists() {
        // report the catalog miss with its suggestions
        catalog.resolve(arg)?;
    }
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let structure = if value.get("marks").is_some() {
        from_marks(&MarkTable::from_json(&text)?)?
    } else {
        PreferenceStructure::from_json(&text)?
    };
    let label = structure.name.clone().unwrap_or_else(|| arg.to_string());
    Ok(StructureArg {
        structure,
        resolved: None,
        label,
    })
}

/// Catalog name first, then equation text.
pub fn equation(catalog: &Catalog, arg: &str) -> Result<(LossEquation, Option<String>)> {
    if let Ok(resolved) = catalog.resolve(arg) {
        return Ok((resolved.entry.equation.clone(), Some(resolved.entry.name.clone())));
    }
    if !arg.contains('(') {
        catalog.resolve(arg)?;
    }
    Ok((parse_equation(arg)?, None))
}

/// Inline JSON object or a path to a JSON file.
pub fn weights(arg: &str) -> Result<WeightMap> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return WeightMap::from_json(arg);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(Error::InvalidArgument(format!(
            "`{arg}` is neither a JSON object nor a file"
        )));
    }
    WeightMap::from_json(&std::fs::read_to_string(path)?)
}
