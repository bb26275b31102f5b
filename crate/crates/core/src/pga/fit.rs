//! Axis-by-axis fitting loop.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bdt::Bdt;
use crate::error::{Error, Result};
use crate::wasserstein::{
    diagonal_projection, frechet_barycenter, restricted_geodesic, wt2_bdts, wt2_distance,
    Assignment,
};

use super::constraints::constraint_loop;
use super::reconstruct::{extremity, reconstruct, translate_step};
use super::update::update_axis;
use super::{GeodesicAxis, PgaBasis, PgaParams};

const STOP_RATIO: f64 = 0.01;
const MAX_ITERATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub dimension: usize,
    pub iteration: usize,
    pub energy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FitReport {
    /// Fitting energy at every projection step. When the loop stops on an
    /// energy increase, the best earlier state is restored and its energy is
    /// appended as the closing record of that dimension.
    pub energy_trace: Vec<EnergyRecord>,
    /// Per dimension: stopped on the 1% rule rather than the iteration cap.
    pub converged: Vec<bool>,
    /// Per dimension: the axis collapsed to zero length.
    pub degenerate_axes: Vec<bool>,
    /// `(dimension, iteration)` of updates skipped for singular equations.
    pub degenerate_updates: Vec<(usize, usize)>,
    pub barycenter_energy: f64,
    pub barycenter_trace: Vec<f64>,
    /// Final fitting energy after each dimension.
    pub final_energy: Vec<f64>,
}

impl FitReport {
    /// Energies recorded for one dimension, in order.
    pub fn dimension_trace(&self, dimension: usize) -> Vec<f64> {
        self.energy_trace
            .iter()
            .filter(|r| r.dimension == dimension)
            .map(|r| r.energy)
            .collect()
    }
}

/// Closest sample of a member on an axis translated to `base`.
#[derive(Debug, Clone)]
pub struct Projection {
    pub alpha: f64,
    pub reconstruction: Bdt,
    pub distance: f64,
    /// From the reconstruction (left) to the member (right).
    pub assignment: Assignment,
}

fn sample_alpha(s: usize, n2: usize) -> f64 {
    s as f64 / (n2 - 1) as f64
}

fn project_on(member: &Bdt, base: &Bdt, axis: &GeodesicAxis, n2: usize) -> Result<Projection> {
    let mut best_s = 0;
    let mut best_d = f64::INFINITY;
    for s in 0..n2 {
        let cand = translate_step(base, axis, sample_alpha(s, n2));
        let d = wt2_distance(&cand, member)?;
        // Later samples must win by more than rounding noise.
        if s == 0 || d < best_d - 1e-12 * best_d.max(1.0) {
            best_d = d;
            best_s = s;
        }
    }
    let alpha = sample_alpha(best_s, n2);
    let reconstruction = translate_step(base, axis, alpha);
    let (distance, assignment) = wt2_bdts(&reconstruction, member)?;
    Ok(Projection {
        alpha,
        reconstruction,
        distance,
        assignment,
    })
}

/// Projects `member` on axis `dimension` of `basis`, translated to the
/// reconstruction at `previous` (the member's coordinates on earlier axes).
pub fn project_tree(
    member: &Bdt,
    basis: &PgaBasis,
    dimension: usize,
    previous: &[f64],
) -> Result<Projection> {
    if dimension >= basis.axes.len() {
        return Err(Error::DimensionOutOfRange {
            d_max: dimension + 1,
            max: basis.axes.len(),
        });
    }
    if previous.len() != dimension {
        return Err(Error::DimensionMismatch {
            expected: dimension,
            got: previous.len(),
        });
    }
    let base = reconstruct(basis, previous)?;
    project_on(member, &base, &basis.axes[dimension], basis.params.n2.max(2))
}

/// `Σ_j W^T_2(B_j, reconstruct(α_j))²`.
pub fn fitting_energy(ensemble: &[Bdt], basis: &PgaBasis, coords: &[Vec<f64>]) -> Result<f64> {
    let d: Vec<f64> = ensemble
        .par_iter()
        .zip(coords)
        .map(|(m, a)| wt2_distance(m, &reconstruct(basis, a)?))
        .collect::<Result<_>>()?;
    Ok(d.iter().map(|x| x * x).sum())
}

/// Initial axis for dimension `previous.len()`: a geodesic toward the member
/// farthest from the origin (first axis) or from the previous axes, each
/// axis being represented by its `n2` samples. `g' = −g`.
pub fn init_axis(
    ensemble: &[Bdt],
    origin: &Bdt,
    previous: &[GeodesicAxis],
    n2: usize,
) -> Result<GeodesicAxis> {
    let dist: Vec<f64> = if previous.is_empty() {
        ensemble
            .par_iter()
            .map(|m| wt2_distance(origin, m))
            .collect::<Result<_>>()?
    } else {
        let samples: Vec<Bdt> = previous
            .iter()
            .flat_map(|axis| (0..n2).map(move |s| extremity(origin, axis, sample_alpha(s, n2))))
            .collect();
        ensemble
            .par_iter()
            .map(|m| {
                samples
                    .iter()
                    .map(|s| wt2_distance(s, m))
                    .try_fold(f64::INFINITY, |acc, d| d.map(|d| acc.min(d)))
            })
            .collect::<Result<_>>()?
    };
    let mut far = 0;
    for (j, &d) in dist.iter().enumerate() {
        if d > dist[far] {
            far = j;
        }
    }
    let (g, _) = restricted_geodesic(origin, &ensemble[far])?;
    let g_prime = g.iter().map(|x| -x).collect();
    Ok(GeodesicAxis { g, g_prime })
}

/// Residual of every member against its translated base, per axis entry.
/// Destroyed branches target the diagonal projection of their current
/// reconstruction.
fn residuals(ensemble: &[Bdt], bases: &[Bdt], projections: &[Projection]) -> Vec<Vec<f64>> {
    ensemble
        .iter()
        .zip(bases)
        .zip(projections)
        .map(|((member, base), proj)| {
            let recon = &proj.reconstruction;
            let partner = proj.assignment.left_to_right(recon.len());
            let mut r = Vec::with_capacity(2 * recon.len());
            for (i, p) in partner.into_iter().enumerate() {
                let target = match p {
                    Some(j) => member.branches[j].point(),
                    None => diagonal_projection(recon.branches[i].point()),
                };
                r.push(target.birth - base.branches[i].birth);
                r.push(target.death - base.branches[i].death);
            }
            r
        })
        .collect()
}

struct DimensionState {
    axis: GeodesicAxis,
    projections: Vec<Projection>,
    energy: f64,
}

/// Fits the barycenter and `params.d_max` orthogonal geodesic axes.
///
/// Per dimension: initialize and constrain the axis, then alternate
/// projection (assignment) and closed-form update plus constraints until the
/// energy gains less than 1%. An energy increase ends the loop and the best
/// state seen is kept, so the final energy never exceeds the first one.
pub fn fit_basis(ensemble: &[Bdt], params: &PgaParams) -> Result<(PgaBasis, FitReport)> {
    if ensemble.len() < 2 {
        return Err(Error::EnsembleTooSmall {
            needed: 2,
            got: ensemble.len(),
        });
    }
    if params.n2 < 2 {
        return Err(Error::InvalidParameter(format!("n2 must be at least 2, got {}", params.n2)));
    }
    let bary = frechet_barycenter(ensemble, params.n1)?;
    let origin = bary.bdt;
    let max_dim = 2 * origin.len();
    if params.d_max == 0 || params.d_max > max_dim {
        return Err(Error::DimensionOutOfRange {
            d_max: params.d_max,
            max: max_dim,
        });
    }
    let mut report = FitReport {
        barycenter_energy: bary.energy,
        barycenter_trace: bary.energy_trace,
        ..FitReport::default()
    };
    let n = ensemble.len();
    let mut axes: Vec<GeodesicAxis> = Vec::new();
    let mut coords: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut bases: Vec<Bdt> = vec![origin.clone(); n];
    let mut energy_so_far = bary.energy;

    for dim in 0..params.d_max {
        let init = init_axis(ensemble, &origin, &axes, params.n2)?;
        let (mut axis, mut degenerate) = constraint_loop(&init, &origin, &axes)?;
        let mut converged = true;
        let mut best: Option<DimensionState> = None;

        if !degenerate {
            let mut prev: Option<f64> = None;
            converged = false;
            for iteration in 0..MAX_ITERATIONS {
                let projections: Vec<Projection> = ensemble
                    .par_iter()
                    .zip(&bases)
                    .map(|(m, base)| project_on(m, base, &axis, params.n2))
                    .collect::<Result<_>>()?;
                let energy: f64 = projections.iter().map(|p| p.assignment.cost).sum();
                report.energy_trace.push(EnergyRecord {
                    dimension: dim,
                    iteration,
                    energy,
                });
                let stop = match prev {
                    Some(p) => p - energy < STOP_RATIO * p,
                    None => false,
                } || energy == 0.0;
                let state = DimensionState {
                    axis: axis.clone(),
                    projections,
                    energy,
                };
                let alphas: Vec<f64> = state.projections.iter().map(|p| p.alpha).collect();
                let res = residuals(ensemble, &bases, &state.projections);
                if best.as_ref().is_none_or(|b| energy < b.energy) {
                    best = Some(state);
                }
                if stop {
                    converged = true;
                    break;
                }
                prev = Some(energy);

                let update = update_axis(&axis, &alphas, &res);
                if update.degenerate {
                    report.degenerate_updates.push((dim, iteration));
                }
                let (next, collapsed) = constraint_loop(&update.axis, &origin, &axes)?;
                if collapsed {
                    // Keep the last valid axis rather than a zero one.
                    converged = true;
                    break;
                }
                axis = next;
            }
            let last = report.energy_trace.last().map(|r| (r.iteration, r.energy));
            if let (Some(b), Some((it, e))) = (&best, last) {
                if b.energy < e {
                    report.energy_trace.push(EnergyRecord {
                        dimension: dim,
                        iteration: it + 1,
                        energy: b.energy,
                    });
                }
            }
            degenerate = best.is_none();
        }

        match best {
            Some(state) if !degenerate => {
                for (j, p) in state.projections.into_iter().enumerate() {
                    coords[j].push(p.alpha);
                    bases[j] = p.reconstruction;
                }
                energy_so_far = state.energy;
                axes.push(state.axis);
            }
            _ => {
                degenerate = true;
                for c in coords.iter_mut() {
                    c.push(0.0);
                }
                axes.push(GeodesicAxis::zero(origin.len()));
            }
        }
        report.converged.push(converged);
        report.degenerate_axes.push(degenerate);
        report.final_energy.push(energy_so_far);
    }

    let axis_lengths = axes
        .iter()
        .map(|axis| wt2_distance(&extremity(&origin, axis, 1.0), &extremity(&origin, axis, 0.0)))
        .collect::<Result<_>>()?;
    let basis = PgaBasis {
        origin,
        axes,
        axis_lengths,
        coords,
        params: *params,
    };
    Ok((basis, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdt::Branch;

    fn tree(children: &[(f64, f64)]) -> Bdt {
        let ch = children
            .iter()
            .map(|&(birth, death)| Branch {
                birth,
                death,
                parent: Some(0),
            })
            .collect();
        Bdt::normalized_from(ch, [0.0, 1.0]).unwrap()
    }

    fn params(d_max: usize) -> PgaParams {
        PgaParams {
            d_max,
            n1: 100,
            n2: 16,
            eps1: 0.05,
            eps2: 0.95,
            eps3: 0.9,
        }
    }

    #[test]
    fn identical_members_give_zero_axes() {
        let b = tree(&[(0.2, 0.6)]);
        let (basis, report) = fit_basis(&[b.clone(), b.clone(), b], &params(1)).unwrap();
        assert!(basis.axes[0].is_zero());
        assert_eq!(basis.axis_lengths, vec![0.0]);
        assert!(basis.coords.iter().all(|c| c == &vec![0.0]));
        assert_eq!(report.degenerate_axes, vec![true]);
    }

    #[test]
    fn rejects_bad_sizes() {
        let b = tree(&[(0.2, 0.6)]);
        assert!(matches!(
            fit_basis(&[b.clone()], &params(1)),
            Err(Error::EnsembleTooSmall { .. })
        ));
        assert!(matches!(
            fit_basis(&[b.clone(), b.clone()], &params(0)),
            Err(Error::DimensionOutOfRange { .. })
        ));
        assert!(matches!(
            fit_basis(&[b.clone(), b], &params(5)),
            Err(Error::DimensionOutOfRange { d_max: 5, max: 4 })
        ));
    }

    #[test]
    fn one_axis_line() {
        // Six members evenly spaced on a segment; spacing 1/5 lies on the
        // 16-sample lattice.
        let members: Vec<Bdt> = (0..6)
            .map(|k| {
                let t = k as f64 / 5.0;
                tree(&[(0.1 + 0.2 * t, 0.6 + 0.2 * t)])
            })
            .collect();
        let (basis, report) = fit_basis(&members, &params(1)).unwrap();
        let e = fitting_energy(&members, &basis, &basis.coords).unwrap();
        assert!(e <= 1e-4 * report.barycenter_energy, "energy {e}");
        assert!(e < 1e-8, "energy {e}");
        let mut sorted: Vec<f64> = basis.coords.iter().map(|c| c[0]).collect();
        sorted.dedup();
        assert_eq!(sorted.len(), 6);
    }
}
