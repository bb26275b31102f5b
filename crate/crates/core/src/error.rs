use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the topology, metric and basis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid scalar field: {0}")]
    InvalidField(String),

    #[error("degenerate branch {branch}: parent {parent} has zero persistence")]
    DegenerateBranch { branch: usize, parent: usize },

    #[error("invalid BDT: {0}")]
    InvalidBdt(String),

    #[error("BDT must be normalized for this operation")]
    NotNormalized,

    #[error("interpolated BDT leaves the normalized domain at branch {branch}: ({birth}, {death})")]
    InvalidInterpolation { branch: usize, birth: f64, death: f64 },

    #[error("geodesic vector has {got} entries, anchor expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("ensemble needs at least {needed} members, got {got}")]
    EnsembleTooSmall { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("d_max = {d_max} out of range [1, {max}]")]
    DimensionOutOfRange { d_max: usize, max: usize },

    #[error("alpha out of [0,1]: {0}")]
    AlphaOutOfRange(String),

    #[error("alpha has {got} coordinates but the basis has {d_max} axes")]
    TooManyCoordinates { got: usize, d_max: usize },

    #[error("layout needs at least two axes, basis has {0}")]
    LayoutNeedsTwoAxes(usize),

    #[error("maximum pairwise distance is zero; relative error undefined")]
    ZeroSpread,

    #[error("unsupported archive format version {0}")]
    FormatVersion(u32),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
