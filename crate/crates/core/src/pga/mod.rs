//! Principal geodesic analysis in the W^T_2 space of BDTs.
//!
//! A basis is an origin (the barycenter `B*`) and a sequence of geodesic
//! axes. Axis `k` is a pair of displacement vectors `(g, g')` over the
//! branches of `B*`; the point at coordinate `α` is `α·g + (1−α)·g'`.
//! Coordinates of later axes are applied on top of earlier ones, i.e. each
//! axis is translated to the reconstruction along the previous axes.

mod constraints;
mod fit;
mod reconstruct;
mod update;

use serde::{Deserialize, Serialize};

use crate::bdt::Bdt;

pub use constraints::{
    constraint_loop, enforce_collinearity, enforce_geodesic, enforce_orthogonality,
    CONSTRAINT_ITERATIONS,
};
pub use fit::{
    fit_basis, fitting_energy, init_axis, project_tree, EnergyRecord, FitReport, Projection,
};
pub use reconstruct::{extremity, reconstruct, reconstruct_from, translate_step};
pub use update::{individual_energy, update_axis, AxisUpdate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GeodesicAxis {
    pub g: Vec<f64>,
    pub g_prime: Vec<f64>,
}

impl GeodesicAxis {
    pub fn zero(n_branches: usize) -> Self {
        Self {
            g: vec![0.0; 2 * n_branches],
            g_prime: vec![0.0; 2 * n_branches],
        }
    }

    /// `V = g − g'`.
    pub fn direction(&self) -> Vec<f64> {
        self.g.iter().zip(&self.g_prime).map(|(a, b)| a - b).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.g.iter().chain(&self.g_prime).all(|&x| x == 0.0)
    }

    /// `g·g' + ‖g‖‖g'‖`; zero for negatively collinear vectors.
    pub fn collinearity_residual(&self) -> f64 {
        dot(&self.g, &self.g_prime) + norm(&self.g) * norm(&self.g_prime)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PgaParams {
    pub d_max: usize,
    /// Branch budget of the barycenter.
    pub n1: usize,
    /// Samples per axis during projection.
    pub n2: usize,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
}

impl PgaParams {
    pub const DEFAULT_N1_RATIO: f64 = 0.20;
    pub const DEFAULT_N2: usize = 16;
    pub const DEFAULT_EPS1: f64 = 0.05;
    pub const DEFAULT_EPS2: f64 = 0.95;
    pub const DEFAULT_EPS3: f64 = 0.9;

    /// Defaults with `n1` taken as a ratio of the total ensemble branch count.
    pub fn with_defaults(d_max: usize, ensemble: &[Bdt]) -> Self {
        let total: usize = ensemble.iter().map(Bdt::len).sum();
        Self {
            d_max,
            n1: n1_from_ratio(Self::DEFAULT_N1_RATIO, total),
            n2: Self::DEFAULT_N2,
            eps1: Self::DEFAULT_EPS1,
            eps2: Self::DEFAULT_EPS2,
            eps3: Self::DEFAULT_EPS3,
        }
    }
}

/// `ceil(ratio * total)`, at least one branch.
pub fn n1_from_ratio(ratio: f64, total_branches: usize) -> usize {
    ((ratio * total_branches as f64).ceil() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PgaBasis {
    pub origin: Bdt,
    pub axes: Vec<GeodesicAxis>,
    /// `W^T_2(E_k, E'_k)` between the materialized extremities of each axis.
    pub axis_lengths: Vec<f64>,
    /// One row of `d_max` coordinates in `[0,1]` per member.
    pub coords: Vec<Vec<f64>>,
    pub params: PgaParams,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
