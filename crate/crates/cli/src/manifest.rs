//! Ensemble manifests and member loading.
//!
//! ```json
//! {
//!   "members": [{"id": "t000", "path": "fields/t000.grid"}],
//!   "treeKind": "join",
//!   "preprocessing": {"simplify": 0.0025, "eps1": 0.05}
//! }
//! ```
//!
//! Paths are relative to the manifest. Members are `.grid` scalar fields or
//! BDT JSON files (anything else).

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use mtpga_core::{load_scalar_field, prepare_bdt, Bdt, EnsembleKind, Preprocessing, field_to_bdt};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestMember {
    pub id: String,
    pub path: PathBuf,
}

/// Preprocessing values that may be left unset and filled in from a lower
/// priority source.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PreprocessingOverrides {
    pub simplify: Option<f64>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub eps3: Option<f64>,
}

impl PreprocessingOverrides {
    /// Fields set here win over `base`.
    pub fn over(&self, base: &PreprocessingOverrides) -> PreprocessingOverrides {
        PreprocessingOverrides {
            simplify: self.simplify.or(base.simplify),
            eps1: self.eps1.or(base.eps1),
            eps2: self.eps2.or(base.eps2),
            eps3: self.eps3.or(base.eps3),
        }
    }

    pub fn resolve(&self) -> Result<Preprocessing> {
        let d = Preprocessing::default();
        let p = Preprocessing {
            simplify: self.simplify.unwrap_or(d.simplify),
            eps1: self.eps1.unwrap_or(d.eps1),
            eps2: self.eps2.unwrap_or(d.eps2),
            eps3: self.eps3.unwrap_or(d.eps3),
        };
        for (name, v) in [("simplify", p.simplify), ("eps1", p.eps1), ("eps2", p.eps2), ("eps3", p.eps3)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(CliError::Usage(format!("--{name} must lie in [0,1], got {v}")));
            }
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EnsembleManifest {
    pub members: Vec<ManifestMember>,
    #[serde(default)]
    pub tree_kind: Option<EnsembleKind>,
    #[serde(default)]
    pub preprocessing: PreprocessingOverrides,
}

impl EnsembleManifest {
    /// Reads a manifest and resolves member paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut m: EnsembleManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("{}: invalid manifest: {e}", path.display())))?;
        m.validate()?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for member in &mut m.members {
            if member.path.is_relative() {
                member.path = dir.join(&member.path);
            }
        }
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(CliError::Data("manifest lists no members".into()));
        }
        let mut seen = HashSet::new();
        for m in &self.members {
            if !seen.insert(m.id.as_str()) {
                return Err(CliError::Data(format!("duplicate member id `{}`", m.id)));
            }
        }
        Ok(())
    }

    pub fn ids(&self) -> Vec<String> {
        self.members.iter().map(|m| m.id.clone()).collect()
    }
}

/// Loads one member as a normalized BDT.
pub fn load_member(path: &Path, kind: EnsembleKind, pre: &Preprocessing) -> Result<Bdt> {
    if path.extension().is_some_and(|e| e == "grid") {
        let field = load_scalar_field(path)?;
        return Ok(field_to_bdt(&field, kind, pre)?);
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let raw: Bdt = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: invalid BDT JSON: {e}", path.display())))?;
    prepare_bdt(&raw, &pre.effective(kind))
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Loads all members in parallel, keeping manifest order.
pub fn load_ensemble(manifest: &EnsembleManifest, kind: EnsembleKind, pre: &Preprocessing) -> Result<Vec<Bdt>> {
    manifest
        .members
        .par_iter()
        .map(|m| load_member(&m.path, kind, pre))
        .collect()
}
