//! Ensembles generated from a known basis.

use mtpga_core::pga::{reconstruct_from, GeodesicAxis};
use mtpga_core::{Bdt, Branch};
use rand::Rng;

pub struct PlantedDesign {
    /// Branches moved by each axis (disjoint sets, hence orthogonal axes).
    pub branches_per_axis: usize,
    /// Norm of each axis direction `V_k`.
    pub axis_norms: Vec<f64>,
    /// Coordinates used on each axis; members are the cartesian product.
    pub levels: Vec<Vec<f64>>,
    /// Branches no axis moves.
    pub static_branches: usize,
}

pub struct Planted {
    pub origin: Bdt,
    pub axes: Vec<GeodesicAxis>,
    /// Member coordinates, one row per member.
    pub alphas: Vec<Vec<f64>>,
    pub members: Vec<Bdt>,
}

/// Cartesian product of the per-axis levels, first axis slowest.
fn product(levels: &[Vec<f64>]) -> Vec<Vec<f64>> {
    levels.iter().fold(vec![Vec::new()], |acc, lv| {
        acc.iter()
            .flat_map(|prefix| {
                lv.iter().map(move |&a| {
                    let mut row = prefix.clone();
                    row.push(a);
                    row
                })
            })
            .collect()
    })
}

/// Flat origin with branches on well separated cells, so identity
/// assignments stay optimal for small displacements. Each axis moves its
/// own branches along a random direction; `β_k = 1 − mean(levels_k)` puts
/// the origin at the centre of the members along every axis, which makes it
/// their barycenter.
pub fn planted_ensemble<R: Rng>(rng: &mut R, design: &PlantedDesign) -> Planted {
    let d = design.axis_norms.len();
    let moving = d * design.branches_per_axis;
    let k = moving + design.static_branches;
    let cell = 0.5 / k as f64;
    let children: Vec<Branch> = (0..k)
        .map(|i| {
            let c = (i as f64 + 0.5) * cell;
            Branch {
                birth: c,
                death: 0.5 + c,
                parent: Some(0),
            }
        })
        .collect();
    let origin = Bdt::normalized_from(children, [0.0, 1.0]).expect("valid");
    let len = 2 * origin.len();

    let axes: Vec<GeodesicAxis> = (0..d)
        .map(|a| {
            let mut v = vec![0.0; len];
            for b in 0..design.branches_per_axis {
                let branch = 1 + a * design.branches_per_axis + b;
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                v[2 * branch] = theta.cos();
                v[2 * branch + 1] = theta.sin();
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x *= design.axis_norms[a] / norm);
            let mean = design.levels[a].iter().sum::<f64>() / design.levels[a].len() as f64;
            let beta = 1.0 - mean;
            GeodesicAxis {
                g: v.iter().map(|x| beta * x).collect(),
                g_prime: v.iter().map(|x| -(1.0 - beta) * x).collect(),
            }
        })
        .collect();

    let alphas = product(&design.levels);
    let members = alphas
        .iter()
        .map(|a| reconstruct_from(&origin, &axes, a).expect("valid coordinates"))
        .collect();
    Planted {
        origin,
        axes,
        alphas,
        members,
    }
}
