//! Principal geodesic analysis of merge trees and persistence diagrams.
//!
//! The pipeline goes scalar field → merge tree → branch decomposition tree
//! (BDT) → normalized BDT, then fits an orthogonal basis of geodesic axes in
//! the Wasserstein space of BDTs and uses it for compression, layouts and
//! reconstruction.

pub mod analysis;
pub mod bdt;
pub mod diagram;
pub mod error;
pub mod grid;
pub mod hungarian;
pub mod ingest;
pub mod merge_tree;
pub mod pga;
pub mod wasserstein;

pub use bdt::{bdt_to_merge_tree, branch_decomposition, Bdt, Branch};
pub use diagram::{BirthDeathPoint, PersistenceDiagram};
pub use error::{Error, Result};
pub use ingest::{field_to_bdt, field_to_raw_bdt, prepare_bdt, EnsembleKind, Preprocessing};
pub use grid::{load_scalar_field, ScalarFieldGrid};
pub use merge_tree::{compute_merge_tree, MergeTree, MtNode, NodeRole, TreeKind};
pub use pga::{fit_basis, reconstruct, FitReport, GeodesicAxis, PgaBasis, PgaParams};
pub use wasserstein::{
    diagonal_projection, frechet_barycenter, geodesic, ground_distance, interpolate, w2_diagrams,
    wt2_bdts, wt2_distance, Assignment, Barycenter, Geodesic, GeodesicVector,
};
