use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bdt::Bdt;
use crate::error::{Error, Result};
use crate::pga::{reconstruct, PgaBasis};
use crate::wasserstein::{wt2_bdts, wt2_distance};

use super::mds::classical_mds;

/// Symmetric matrix of W^T_2 distances, filled in parallel.
pub fn pairwise_distances(trees: &[Bdt]) -> Result<Vec<Vec<f64>>> {
    let n = trees.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let d: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| wt2_distance(&trees[i], &trees[j]))
        .collect::<Result<_>>()?;
    let mut out = vec![vec![0.0; n]; n];
    for (&(i, j), &x) in pairs.iter().zip(&d) {
        out[i][j] = x;
        out[j][i] = x;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReconstructionError {
    /// `W^T_2(B_j, reconstruction_j)` over the largest input distance.
    pub per_member: Vec<f64>,
    pub mean: f64,
    pub max_pairwise: f64,
}

pub fn reconstruction_error(ensemble: &[Bdt], basis: &PgaBasis) -> Result<ReconstructionError> {
    let max_pairwise = pairwise_distances(ensemble)?
        .iter()
        .flatten()
        .copied()
        .fold(0.0, f64::max);
    if max_pairwise == 0.0 {
        return Err(Error::ZeroSpread);
    }
    let per_member: Vec<f64> = ensemble
        .par_iter()
        .zip(&basis.coords)
        .map(|(m, a)| Ok(wt2_distance(m, &reconstruct(basis, a)?)? / max_pairwise))
        .collect::<Result<_>>()?;
    let mean = per_member.iter().sum::<f64>() / per_member.len() as f64;
    Ok(ReconstructionError {
        per_member,
        mean,
        max_pairwise,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Layout2D {
    pub points: Vec<[f64; 2]>,
    pub axis_lengths: [f64; 2],
    #[serde(default)]
    pub labels: Vec<String>,
}

/// Member `j` at `(α_1 · L_1, α_2 · L_2)`.
pub fn layout_2d(basis: &PgaBasis, labels: Vec<String>) -> Result<Layout2D> {
    if basis.axes.len() < 2 {
        return Err(Error::LayoutNeedsTwoAxes(basis.axes.len()));
    }
    let l = [basis.axis_lengths[0], basis.axis_lengths[1]];
    Ok(Layout2D {
        points: basis.coords.iter().map(|a| [a[0] * l[0], a[1] * l[1]]).collect(),
        axis_lengths: l,
        labels,
    })
}

/// Variance of the scaled projections on each axis, over the mean squared
/// distance of the members to the origin. Zero when that mean is zero.
pub fn projected_variances(ensemble: &[Bdt], basis: &PgaBasis) -> Result<Vec<f64>> {
    let d: Vec<f64> = ensemble
        .par_iter()
        .map(|m| wt2_distance(m, &basis.origin))
        .collect::<Result<_>>()?;
    let n = ensemble.len() as f64;
    let global = d.iter().map(|x| x * x).sum::<f64>() / n;
    Ok((0..basis.axes.len())
        .map(|k| {
            if global == 0.0 {
                return 0.0;
            }
            let proj: Vec<f64> = basis.coords.iter().map(|a| a[k] * basis.axis_lengths[k]).collect();
            let mean = proj.iter().sum::<f64>() / n;
            let var = proj.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            var / global
        })
        .collect())
}

/// Population Pearson correlation; `None` when either side is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationView {
    /// Per origin branch, correlation of its persistence with `α_1`, `α_2`.
    pub arrows: Vec<[f64; 2]>,
    /// Set when an arrow is undefined (constant persistence or coordinate)
    /// and was emitted as zero.
    pub flags: Vec<bool>,
}

/// Correlation between each origin branch's matched persistence (original
/// units, zero when unmatched) and the first two coordinates.
pub fn persistence_correlation(ensemble: &[Bdt], basis: &PgaBasis) -> Result<CorrelationView> {
    if ensemble.len() < 2 {
        return Err(Error::EnsembleTooSmall {
            needed: 2,
            got: ensemble.len(),
        });
    }
    let nb = basis.origin.len();
    let rows: Vec<Vec<f64>> = ensemble
        .par_iter()
        .map(|m| {
            let (_, a) = wt2_bdts(&basis.origin, m)?;
            let pers = m.denormalized_persistence();
            Ok(a.left_to_right(nb)
                .into_iter()
                .map(|p| p.map_or(0.0, |j| pers[j]))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut arrows = Vec::with_capacity(nb);
    let mut flags = Vec::with_capacity(nb);
    for i in 0..nb {
        let p: Vec<f64> = rows.iter().map(|r| r[i]).collect();
        let mut arrow = [0.0; 2];
        let mut flag = false;
        for (k, slot) in arrow.iter_mut().enumerate() {
            if k >= basis.axes.len() {
                flag = true;
                continue;
            }
            let a: Vec<f64> = basis.coords.iter().map(|c| c[k]).collect();
            match pearson(&p, &a) {
                Some(r) => *slot = r,
                None => flag = true,
            }
        }
        if flag {
            arrow = [0.0; 2];
        }
        arrows.push(arrow);
        flags.push(flag);
    }
    Ok(CorrelationView { arrows, flags })
}

/// Layout quality: `1 − mean δ'` over unordered pairs, with
/// `δ = (‖x−y‖ − W)²` normalized by its maximum.
pub fn sim_from_distances(points: &[[f64; 2]], dist: &[Vec<f64>]) -> f64 {
    let n = points.len();
    let mut deltas = Vec::new();
    let mut scale: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let e = (points[i][0] - points[j][0]).hypot(points[i][1] - points[j][1]);
            scale = scale.max(e).max(dist[i][j]);
            deltas.push((e - dist[i][j]).powi(2));
        }
    }
    sim_from_deltas(&deltas, scale)
}

/// `1 − mean(δ / max δ)`; 1 when every distortion is at rounding level
/// relative to `scale`, the largest distance involved.
pub fn sim_from_deltas(deltas: &[f64], scale: f64) -> f64 {
    let max = deltas.iter().copied().fold(0.0, f64::max);
    if deltas.is_empty() || max <= 1e-24 * scale.max(1.0).powi(2) {
        return 1.0;
    }
    1.0 - deltas.iter().map(|d| d / max).sum::<f64>() / deltas.len() as f64
}

pub fn sim_indicator(layout: &Layout2D, ensemble: &[Bdt]) -> Result<f64> {
    if ensemble.len() < 2 {
        return Err(Error::EnsembleTooSmall {
            needed: 2,
            got: ensemble.len(),
        });
    }
    Ok(sim_from_distances(&layout.points, &pairwise_distances(ensemble)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PgsMesh {
    pub grid_dims: [usize; 2],
    pub vertices: Vec<[f64; 3]>,
    pub source_alphas: Vec<[f64; 2]>,
}

fn grid_alpha(i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        i as f64 / (n - 1) as f64
    }
}

/// Reconstructions over a regular `(α_1, α_2)` grid, embedded in 3D by
/// classical MDS of their pairwise distances. Vertices are x-fastest.
pub fn pgs_surface(basis: &PgaBasis, nx: usize, ny: usize) -> Result<PgsMesh> {
    if basis.axes.len() < 2 {
        return Err(Error::LayoutNeedsTwoAxes(basis.axes.len()));
    }
    let source_alphas: Vec<[f64; 2]> = (0..ny)
        .flat_map(|iy| (0..nx).map(move |ix| [grid_alpha(ix, nx), grid_alpha(iy, ny)]))
        .collect();
    let trees: Vec<Bdt> = source_alphas
        .iter()
        .map(|a| reconstruct(basis, a))
        .collect::<Result<_>>()?;
    let dist = pairwise_distances(&trees)?;
    let vertices = classical_mds(&dist, 3)
        .into_iter()
        .map(|v| [v[0], v[1], v[2]])
        .collect();
    Ok(PgsMesh {
        grid_dims: [nx, ny],
        vertices,
        source_alphas,
    })
}
