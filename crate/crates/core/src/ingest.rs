//! Scalar field (or raw BDT) to normalized BDT, with the preprocessing
//! steps applied in order: simplification, saddle merging, branch
//! reattachment, removal of zero-persistence branches, normalization.

use serde::{Deserialize, Serialize};

use crate::bdt::{branch_decomposition, Bdt};
use crate::error::Result;
use crate::grid::ScalarFieldGrid;
use crate::merge_tree::{compute_merge_tree, TreeKind};

/// Which topological summary an ensemble is analysed with. `Diagram` uses
/// join trees with every saddle merged, so BDTs are flat and W^T_2 reduces
/// to the diagram distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Join,
    Split,
    Diagram,
}

impl EnsembleKind {
    pub fn tree_kind(self) -> TreeKind {
        match self {
            EnsembleKind::Split => TreeKind::Split,
            EnsembleKind::Join | EnsembleKind::Diagram => TreeKind::Join,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EnsembleKind::Join => "join",
            EnsembleKind::Split => "split",
            EnsembleKind::Diagram => "diagram",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Preprocessing {
    /// Persistence threshold as a fraction of the field range.
    pub simplify: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
}

impl Default for Preprocessing {
    fn default() -> Self {
        Self {
            simplify: 0.0025,
            eps1: 0.05,
            eps2: 0.95,
            eps3: 0.9,
        }
    }
}

impl Preprocessing {
    /// Parameters actually used for `kind` (diagram mode forces `eps1 = 1`).
    pub fn effective(&self, kind: EnsembleKind) -> Self {
        let mut p = *self;
        if kind == EnsembleKind::Diagram {
            p.eps1 = 1.0;
        }
        p
    }
}

/// Unnormalized BDT of a field after simplification and saddle merging.
pub fn field_to_raw_bdt(field: &ScalarFieldGrid, kind: EnsembleKind, pre: &Preprocessing) -> Bdt {
    let pre = pre.effective(kind);
    let tree = compute_merge_tree(field, kind.tree_kind())
        .simplify(pre.simplify)
        .merge_saddles(pre.eps1);
    branch_decomposition(&tree)
}

/// Reattachment, pruning and normalization of a raw BDT. Already normalized
/// input is only validated.
pub fn prepare_bdt(raw: &Bdt, pre: &Preprocessing) -> Result<Bdt> {
    if raw.normalized {
        raw.check_normalized(false)?;
        return Ok(raw.clone());
    }
    raw.check_structure()?;
    raw.preprocess(pre.eps2, pre.eps3)
        .prune_zero_persistence()
        .normalize()
}

pub fn field_to_bdt(field: &ScalarFieldGrid, kind: EnsembleKind, pre: &Preprocessing) -> Result<Bdt> {
    prepare_bdt(&field_to_raw_bdt(field, kind, pre), &pre.effective(kind))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_field_pipeline() {
        let f = ScalarFieldGrid::path(vec![3.0, 1.0, 2.0, 0.0]).unwrap();
        let b = field_to_bdt(&f, EnsembleKind::Join, &Preprocessing::default()).unwrap();
        assert!(b.normalized);
        assert_eq!(b.root_interval, [0.0, 3.0]);
        assert_eq!(b.len(), 2);
        assert!((b.branches[1].birth - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn diagram_mode_is_flat() {
        let f = ScalarFieldGrid::path(vec![0.0, 5.0, 1.0, 4.0, 2.0, 6.0, 0.5, 9.0]).unwrap();
        let pre = Preprocessing {
            eps2: 1.0,
            ..Preprocessing::default()
        };
        let b = field_to_bdt(&f, EnsembleKind::Diagram, &pre).unwrap();
        assert!(b.len() > 2);
        assert_eq!(b.max_depth(), 1);
    }

    #[test]
    fn constant_field_is_root_only() {
        let f = ScalarFieldGrid::path(vec![1.0; 5]).unwrap();
        let b = field_to_bdt(&f, EnsembleKind::Split, &Preprocessing::default()).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.root_interval, [1.0, 1.0]);
    }
}
