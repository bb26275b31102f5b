//! The constrained metric W^T_2: assignments restricted to rooted partial
//! isomorphisms between two normalized BDTs.

use crate::bdt::Bdt;
use crate::diagram::BirthDeathPoint;
use crate::error::Result;
use crate::hungarian;

use super::{diagonal_cost, sq_dist, Assignment};

struct Tables {
    left: Vec<BirthDeathPoint>,
    right: Vec<BirthDeathPoint>,
    left_children: Vec<Vec<usize>>,
    right_children: Vec<Vec<usize>>,
    left_destroy: Vec<f64>,
    right_destroy: Vec<f64>,
    /// `dist2[a * nr + b]`, filled only for pairs at equal depth.
    dist2: Vec<f64>,
    nr: usize,
}

/// Cost of sending a whole subtree to the diagonal, for every branch.
fn subtree_destroy(bdt: &Bdt, points: &[BirthDeathPoint]) -> Vec<f64> {
    let mut out: Vec<f64> = points.iter().map(|&p| diagonal_cost(p)).collect();
    for i in (1..bdt.len()).rev() {
        let p = bdt.branches[i].parent.expect("non-root");
        out[p] += out[i];
    }
    out
}

impl Tables {
    fn new(bi: &Bdt, bj: &Bdt) -> Self {
        let left = bi.points();
        let right = bj.points();
        let left_destroy = subtree_destroy(bi, &left);
        let right_destroy = subtree_destroy(bj, &right);
        let nr = bj.len();
        let mut t = Tables {
            left,
            right,
            left_children: bi.children(),
            right_children: bj.children(),
            left_destroy,
            right_destroy,
            dist2: vec![f64::NAN; bi.len() * nr],
            nr,
        };
        let di = bi.depths();
        let dj = bj.depths();
        // Children have larger indices than parents, so reverse index order
        // visits every child pair before its parents.
        for a in (0..bi.len()).rev() {
            for b in (0..nr).rev() {
                if di[a] == dj[b] {
                    let (forest, _) = t.forest(a, b);
                    t.dist2[a * nr + b] = sq_dist(t.left[a], t.right[b]) + forest;
                }
            }
        }
        t
    }

    /// Optimal matching between the children of `a` and of `b`, where any
    /// child may instead be destroyed together with its subtree.
    fn forest(&self, a: usize, b: usize) -> (f64, Vec<(Option<usize>, Option<usize>)>) {
        let ca = &self.left_children[a];
        let cb = &self.right_children[b];
        let (n, m) = (ca.len(), cb.len());
        let size = n + m;
        if size == 0 {
            return (0.0, Vec::new());
        }
        let mut cost = vec![0.0; size * size];
        for r in 0..size {
            for c in 0..size {
                cost[r * size + c] = match (r < n, c < m) {
                    (true, true) => self.dist2[ca[r] * self.nr + cb[c]],
                    (true, false) => self.left_destroy[ca[r]],
                    (false, true) => self.right_destroy[cb[c]],
                    (false, false) => 0.0,
                };
            }
        }
        let (col_of_row, total) = hungarian::solve(&cost, size);
        let mut pairs = Vec::new();
        for (r, &c) in col_of_row.iter().enumerate() {
            match (r < n, c < m) {
                (true, true) => pairs.push((Some(ca[r]), Some(cb[c]))),
                (true, false) => pairs.push((Some(ca[r]), None)),
                (false, true) => pairs.push((None, Some(cb[c]))),
                (false, false) => {}
            }
        }
        (total, pairs)
    }

    fn backtrack(&self, bi: &Bdt, bj: &Bdt) -> Vec<(Option<usize>, Option<usize>)> {
        let lc = &self.left_children;
        let rc = &self.right_children;
        let mut out = vec![(Some(0), Some(0))];
        let mut stack = vec![(0usize, 0usize)];
        while let Some((a, b)) = stack.pop() {
            let (_, pairs) = self.forest(a, b);
            for pair in pairs {
                match pair {
                    (Some(x), Some(y)) => {
                        out.push((Some(x), Some(y)));
                        stack.push((x, y));
                    }
                    (Some(x), None) => push_subtree(lc, x, &mut out, true),
                    (None, Some(y)) => push_subtree(rc, y, &mut out, false),
                    (None, None) => {}
                }
            }
        }
        debug_assert_eq!(
            out.iter().filter(|p| p.0.is_some()).count(),
            bi.len(),
            "every left branch appears once"
        );
        debug_assert_eq!(out.iter().filter(|p| p.1.is_some()).count(), bj.len());
        out.sort_by_key(|&(l, r)| (l.is_none(), l, r));
        out
    }
}

fn push_subtree(
    children: &[Vec<usize>],
    root: usize,
    out: &mut Vec<(Option<usize>, Option<usize>)>,
    left: bool,
) {
    let mut stack = vec![root];
    while let Some(x) = stack.pop() {
        out.push(if left { (Some(x), None) } else { (None, Some(x)) });
        stack.extend(&children[x]);
    }
}

/// W^T_2 distance and its optimal branch assignment. Both trees must be
/// normalized; roots are always matched.
pub fn wt2_bdts(bi: &Bdt, bj: &Bdt) -> Result<(f64, Assignment)> {
    bi.check_normalized(false)?;
    bj.check_normalized(false)?;
    let t = Tables::new(bi, bj);
    let pairs = t.backtrack(bi, bj);
    let mut assignment = Assignment { pairs, cost: 0.0 };
    assignment.cost = assignment.recompute_cost(&t.left, &t.right);
    Ok((assignment.cost.sqrt(), assignment))
}

/// Distance only (skips backtracking).
pub fn wt2_distance(bi: &Bdt, bj: &Bdt) -> Result<f64> {
    bi.check_normalized(false)?;
    bj.check_normalized(false)?;
    let t = Tables::new(bi, bj);
    Ok(t.dist2[0].max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdt::Branch;

    fn child(birth: f64, death: f64, parent: usize) -> Branch {
        Branch {
            birth,
            death,
            parent: Some(parent),
        }
    }

    fn tree(children: Vec<Branch>) -> Bdt {
        Bdt::normalized_from(children, [0.0, 1.0]).unwrap()
    }

    #[test]
    fn identical_trees() {
        let b = tree(vec![child(0.2, 0.6, 0), child(0.1, 0.3, 1)]);
        let (d, a) = wt2_bdts(&b, &b).unwrap();
        assert_eq!(d, 0.0);
        assert_eq!(a.pairs, vec![(Some(0), Some(0)), (Some(1), Some(1)), (Some(2), Some(2))]);
    }

    #[test]
    fn two_branch_example() {
        let bi = tree(vec![child(0.2, 0.6, 0)]);
        let bj = tree(vec![child(0.3, 0.5, 0)]);
        let (d, a) = wt2_bdts(&bi, &bj).unwrap();
        assert!((d - 0.02f64.sqrt()).abs() < 1e-12);
        assert_eq!(a.pairs, vec![(Some(0), Some(0)), (Some(1), Some(1))]);
        assert_eq!(wt2_distance(&bi, &bj).unwrap(), d);
    }

    #[test]
    fn subtree_destroyed_when_levels_differ() {
        // Left child has a grandchild; right has the same points flat.
        let bi = tree(vec![child(0.0, 0.9, 0), child(0.1, 0.5, 1)]);
        let bj = tree(vec![child(0.0, 0.9, 0), child(0.1, 0.5, 0)]);
        let (d, a) = wt2_bdts(&bi, &bj).unwrap();
        // Grandchild cannot match a depth-1 branch.
        let expected = diagonal_cost(BirthDeathPoint::new(0.1, 0.5)) * 2.0;
        assert!((d * d - expected).abs() < 1e-12);
        assert!(a.pairs.contains(&(Some(2), None)));
        assert!(a.pairs.contains(&(None, Some(2))));
    }

    #[test]
    fn rejects_unnormalized() {
        let raw = Bdt::from_branches(vec![Branch {
            birth: 0.0,
            death: 3.0,
            parent: None,
        }])
        .unwrap();
        assert!(wt2_bdts(&raw, &raw).is_err());
    }
}
