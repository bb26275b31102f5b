use rayon::prelude::*;

use crate::bdt::Bdt;
use crate::error::{Error, Result};

use super::{diagonal_projection, wt2_bdts, wt2_distance, Assignment};

/// Relative energy decrease below which the iterations stop.
const STOP_RATIO: f64 = 0.01;
const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone)]
pub struct Barycenter {
    pub bdt: Bdt,
    /// Optimal assignment from the barycenter to every member.
    pub assignments: Vec<Assignment>,
    pub distances: Vec<f64>,
    /// Fréchet energy of the returned (truncated) barycenter.
    pub energy: f64,
    /// Energy at the start of every assignment/update iteration.
    pub energy_trace: Vec<f64>,
    /// Member the iterations started from.
    pub init_member: usize,
}

fn assign_all(current: &Bdt, ensemble: &[Bdt]) -> Result<Vec<(f64, Assignment)>> {
    ensemble.par_iter().map(|m| wt2_bdts(current, m)).collect()
}

/// Fréchet mean under W^T_2 by alternating assignment and update steps.
///
/// Starts from the member of least Fréchet energy, moves every branch to the
/// mean of its matched points (diagonal projections for destroyed matches),
/// and stops once an iteration gains less than 1%. Afterwards only the `n1`
/// most persistent branches (in original units) are kept, and branches that
/// collapsed onto the diagonal are dropped. Member results are reduced in
/// index order, so the output does not depend on the thread count.
pub fn frechet_barycenter(ensemble: &[Bdt], n1: usize) -> Result<Barycenter> {
    if ensemble.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    for b in ensemble {
        b.check_normalized(false)?;
    }
    let n = ensemble.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let dists: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| wt2_distance(&ensemble[i], &ensemble[j]))
        .collect::<Result<_>>()?;
    let mut frechet = vec![0.0; n];
    for (&(i, j), d) in pairs.iter().zip(&dists) {
        frechet[i] += d * d;
        frechet[j] += d * d;
    }
    let mut init_member = 0;
    for (i, &e) in frechet.iter().enumerate() {
        if e < frechet[init_member] {
            init_member = i;
        }
    }

    let mut current = ensemble[init_member].clone();
    let inv_n = 1.0 / n as f64;
    current.root_interval = [0, 1].map(|k| ensemble.iter().map(|b| b.root_interval[k]).sum::<f64>() * inv_n);

    let mut trace = Vec::new();
    loop {
        let results = assign_all(&current, ensemble)?;
        let energy: f64 = results.iter().map(|(_, a)| a.cost).sum();
        let stop = match trace.last() {
            Some(&prev) => prev - energy < STOP_RATIO * prev,
            None => false,
        };
        trace.push(energy);
        if stop || energy == 0.0 || trace.len() >= MAX_ITERATIONS {
            break;
        }
        let mut sums = vec![[0.0f64; 2]; current.len()];
        for (member, (_, assignment)) in ensemble.iter().zip(&results) {
            for (i, partner) in assignment.left_to_right(current.len()).into_iter().enumerate() {
                let q = match partner {
                    Some(j) => member.branches[j].point(),
                    None => diagonal_projection(current.branches[i].point()),
                };
                sums[i][0] += q.birth;
                sums[i][1] += q.death;
            }
        }
        for (b, s) in current.branches.iter_mut().zip(&sums).skip(1) {
            b.birth = s[0] * inv_n;
            b.death = s[1] * inv_n;
        }
    }

    let truncated = truncate(&current, n1.max(1));
    let results = assign_all(&truncated, ensemble)?;
    let energy = results.iter().map(|(_, a)| a.cost).sum();
    let (distances, assignments) = results.into_iter().unzip();
    Ok(Barycenter {
        bdt: truncated,
        assignments,
        distances,
        energy,
        energy_trace: trace,
        init_member,
    })
}

/// Keeps the root plus the most persistent non-diagonal branches, at most
/// `budget` in total. Nesting makes persistence non-increasing from parent to
/// child and ties favour lower indices, so the kept set is parent-closed.
fn truncate(bdt: &Bdt, budget: usize) -> Bdt {
    let pers = bdt.denormalized_persistence();
    let mut order: Vec<usize> = (1..bdt.len())
        .filter(|&i| pers[i] > 0.0 && bdt.branches[i].birth < bdt.branches[i].death)
        .collect();
    order.sort_by(|&a, &b| pers[b].total_cmp(&pers[a]).then(a.cmp(&b)));
    let mut keep = vec![false; bdt.len()];
    keep[0] = true;
    for &i in order.iter().take(budget - 1) {
        keep[i] = true;
    }
    // Guard against rounding breaking parent-closedness.
    for i in 1..bdt.len() {
        let p = bdt.branches[i].parent.expect("non-root");
        keep[i] &= keep[p];
    }
    bdt.retain(&keep)
}
