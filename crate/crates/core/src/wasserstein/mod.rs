//! Wasserstein metrics between persistence diagrams and between branch
//! decomposition trees, geodesics, and Fréchet barycenters.

mod barycenter;
mod diagrams;
pub(crate) mod geodesic;
mod trees;

use serde::{Deserialize, Serialize};

use crate::diagram::BirthDeathPoint;

pub use barycenter::{frechet_barycenter, Barycenter};
pub use diagrams::w2_diagrams;
pub use geodesic::{geodesic, interpolate, restricted_geodesic, Geodesic};
pub use trees::{wt2_bdts, wt2_distance};

/// Flat birth/death displacement, two entries per anchor branch.
pub type GeodesicVector = Vec<f64>;

/// Optimal matching. `None` on one side means the other point is sent to
/// the diagonal (destroyed on the left, created on the right).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub pairs: Vec<(Option<usize>, Option<usize>)>,
    pub cost: f64,
}

impl Assignment {
    /// Partner of every left index (`None` when destroyed).
    pub fn left_to_right(&self, n_left: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_left];
        for &(l, r) in &self.pairs {
            if let Some(l) = l {
                out[l] = r;
            }
        }
        out
    }

    /// Sum of squared ground distances recomputed from the pairs.
    pub fn recompute_cost(&self, left: &[BirthDeathPoint], right: &[BirthDeathPoint]) -> f64 {
        self.pairs
            .iter()
            .map(|&(l, r)| match (l, r) {
                (Some(l), Some(r)) => sq_dist(left[l], right[r]),
                (Some(l), None) => diagonal_cost(left[l]),
                (None, Some(r)) => diagonal_cost(right[r]),
                (None, None) => 0.0,
            })
            .sum()
    }
}

/// L_q ground distance; zero between two diagonal points.
pub fn ground_distance(p: BirthDeathPoint, q: BirthDeathPoint, q_exp: f64) -> f64 {
    if p.is_diagonal() && q.is_diagonal() {
        return 0.0;
    }
    let dx = (p.birth - q.birth).abs();
    let dy = (p.death - q.death).abs();
    if q_exp == 2.0 {
        dx.hypot(dy)
    } else {
        (dx.powf(q_exp) + dy.powf(q_exp)).powf(1.0 / q_exp)
    }
}

/// Closest diagonal point under L2: `((x+y)/2, (x+y)/2)`.
pub fn diagonal_projection(p: BirthDeathPoint) -> BirthDeathPoint {
    let m = 0.5 * (p.birth + p.death);
    BirthDeathPoint::new(m, m)
}

/// Squared L2 ground distance.
pub(crate) fn sq_dist(p: BirthDeathPoint, q: BirthDeathPoint) -> f64 {
    if p.is_diagonal() && q.is_diagonal() {
        return 0.0;
    }
    let dx = p.birth - q.birth;
    let dy = p.death - q.death;
    dx * dx + dy * dy
}

/// Squared distance to the diagonal projection.
pub(crate) fn diagonal_cost(p: BirthDeathPoint) -> f64 {
    let h = p.death - p.birth;
    0.5 * h * h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(b: f64, d: f64) -> BirthDeathPoint {
        BirthDeathPoint::new(b, d)
    }

    #[test]
    fn ground_distance_examples() {
        assert_eq!(ground_distance(p(0.0, 1.0), p(0.0, 1.0), 2.0), 0.0);
        assert_eq!(ground_distance(p(0.0, 0.0), p(3.0, 4.0), 2.0), 5.0);
        assert_eq!(ground_distance(p(1.0, 1.0), p(2.0, 2.0), 2.0), 0.0);
        assert!((ground_distance(p(0.0, 0.0), p(3.0, 4.0), 1.0) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn projection_examples() {
        assert_eq!(diagonal_projection(p(1.0, 3.0)), p(2.0, 2.0));
        assert_eq!(diagonal_projection(p(2.0, 2.0)), p(2.0, 2.0));
        assert_eq!(diagonal_projection(p(0.0, 4.0)), p(2.0, 2.0));
        let q = p(0.3, 0.9);
        assert!((diagonal_cost(q) - sq_dist(q, diagonal_projection(q))).abs() < 1e-15);
    }
}
