use crate::bdt::{Bdt, Branch};
use crate::error::{Error, Result};

use super::{diagonal_projection, wt2_bdts, Assignment, GeodesicVector};

/// Geodesic from `anchor` toward another BDT. `anchor` is the starting tree
/// augmented with a zero-persistence branch for every branch created on the
/// way, so `vector` has exactly `2 * anchor.len()` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    pub anchor: Bdt,
    pub vector: GeodesicVector,
    pub assignment: Assignment,
    pub distance: f64,
}

/// Displacement of every branch of `bi` under the optimal assignment to
/// `bj`; destroyed branches move to their diagonal projection.
fn displacement(bi: &Bdt, bj: &Bdt, assignment: &Assignment) -> GeodesicVector {
    let partner = assignment.left_to_right(bi.len());
    let mut v = Vec::with_capacity(2 * bi.len());
    for (b, target) in bi.branches.iter().zip(partner) {
        let q = match target {
            Some(j) => bj.branches[j].point(),
            None => diagonal_projection(b.point()),
        };
        v.push(q.birth - b.birth);
        v.push(q.death - b.death);
    }
    v
}

pub fn geodesic(bi: &Bdt, bj: &Bdt) -> Result<Geodesic> {
    let (distance, assignment) = wt2_bdts(bi, bj)?;
    let mut anchor = bi.clone();
    let mut vector = displacement(bi, bj, &assignment);

    let mut anchor_of_right = vec![usize::MAX; bj.len()];
    for &(l, r) in &assignment.pairs {
        if let (Some(l), Some(r)) = (l, r) {
            anchor_of_right[r] = l;
        }
    }
    // Created branches in right index order, so parents are placed first.
    let mut created: Vec<usize> = assignment
        .pairs
        .iter()
        .filter_map(|&(l, r)| if l.is_none() { r } else { None })
        .collect();
    created.sort_unstable();
    for r in created {
        let q = bj.branches[r];
        let parent = q.parent.map(|p| anchor_of_right[p]);
        let start = diagonal_projection(q.point());
        anchor_of_right[r] = anchor.len();
        anchor.branches.push(Branch {
            birth: start.birth,
            death: start.death,
            parent,
        });
        vector.push(q.birth - start.birth);
        vector.push(q.death - start.death);
    }
    Ok(Geodesic {
        anchor,
        vector,
        assignment,
        distance,
    })
}

/// Geodesic truncated to the branches of `bi`: branches created in `bj` are
/// dropped, so the vector stays anchored at `bi` itself.
pub fn restricted_geodesic(bi: &Bdt, bj: &Bdt) -> Result<(GeodesicVector, Assignment)> {
    let (_, assignment) = wt2_bdts(bi, bj)?;
    let v = displacement(bi, bj, &assignment);
    Ok((v, assignment))
}

/// Snaps values within `TOL` of the normalized domain back into it.
const TOL: f64 = 1e-9;

pub(crate) fn snap_unit(x: f64) -> f64 {
    if (-TOL..0.0).contains(&x) {
        0.0
    } else if x > 1.0 && x <= 1.0 + TOL {
        1.0
    } else {
        x
    }
}

/// `B + t * G`, branch by branch. Fails if the result leaves the normalized
/// domain, which cannot happen for vectors produced by `geodesic`.
pub fn interpolate(b: &Bdt, g: &[f64], t: f64) -> Result<Bdt> {
    b.check_normalized(false)?;
    if g.len() != 2 * b.len() {
        return Err(Error::DimensionMismatch {
            expected: 2 * b.len(),
            got: g.len(),
        });
    }
    let mut out = b.clone();
    for (i, br) in out.branches.iter_mut().enumerate() {
        let mut birth = snap_unit(br.birth + t * g[2 * i]);
        let mut death = snap_unit(br.death + t * g[2 * i + 1]);
        if birth > death && birth - death <= TOL {
            let m = 0.5 * (birth + death);
            birth = m;
            death = m;
        }
        let root_ok = i > 0 || (birth == 0.0 && death == 1.0);
        if !root_ok || !(0.0..=1.0).contains(&birth) || !(0.0..=1.0).contains(&death) || birth > death {
            return Err(Error::InvalidInterpolation { branch: i, birth, death });
        }
        br.birth = birth;
        br.death = death;
    }
    Ok(out)
}
