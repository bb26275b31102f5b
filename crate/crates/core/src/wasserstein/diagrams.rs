use crate::diagram::PersistenceDiagram;
use crate::hungarian;

use super::{diagonal_cost, sq_dist, Assignment};

/// Exact L2-Wasserstein distance between two diagrams.
///
/// The `(n+m)²` matrix has the left points and `m` diagonal slots as rows,
/// the right points and `n` diagonal slots as columns. Sending a point to any
/// diagonal slot costs its distance to its own projection, which is the
/// closest diagonal point; slot-to-slot costs are zero.
pub fn w2_diagrams(di: &PersistenceDiagram, dj: &PersistenceDiagram) -> (f64, Assignment) {
    let (n, m) = (di.len(), dj.len());
    let size = n + m;
    let mut cost = vec![0.0; size * size];
    for r in 0..size {
        for c in 0..size {
            cost[r * size + c] = match (r < n, c < m) {
                (true, true) => sq_dist(di.points[r], dj.points[c]),
                (true, false) => diagonal_cost(di.points[r]),
                (false, true) => diagonal_cost(dj.points[c]),
                (false, false) => 0.0,
            };
        }
    }
    let (col_of_row, _) = hungarian::solve(&cost, size);
    let mut pairs = Vec::with_capacity(size);
    for (r, &c) in col_of_row.iter().enumerate() {
        match (r < n, c < m) {
            (true, true) => pairs.push((Some(r), Some(c))),
            (true, false) => pairs.push((Some(r), None)),
            (false, true) => pairs.push((None, Some(c))),
            (false, false) => {}
        }
    }
    pairs.sort_by_key(|&(l, r)| (l.is_none(), l, r));
    let mut assignment = Assignment { pairs, cost: 0.0 };
    assignment.cost = assignment.recompute_cost(&di.points, &dj.points);
    (assignment.cost.sqrt(), assignment)
}
