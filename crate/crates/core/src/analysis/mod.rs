//! Applications of a fitted basis: compression, error metrics, planar
//! layouts and their quality, correlation arrows, and the principal geodesic
//! surface.

mod codec;
mod mds;
mod stats;

pub use codec::{compress, decompress, BasisArchive, CompressionStats, FORMAT_VERSION};
pub use mds::{classical_mds, symmetric_eigen};
pub use stats::{
    layout_2d, pairwise_distances, pearson, persistence_correlation, pgs_surface,
    projected_variances, reconstruction_error, sim_from_deltas, sim_from_distances, sim_indicator,
    CorrelationView, Layout2D, PgsMesh, ReconstructionError,
};
