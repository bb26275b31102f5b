//! Reference implementations written independently of the library code.

use mtpga_core::{Bdt, PersistenceDiagram, ScalarFieldGrid, TreeKind};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

type Pt = (f64, f64);

fn cost(p: Pt, q: Pt) -> f64 {
    if p.0 == p.1 && q.0 == q.1 {
        0.0
    } else {
        (p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)
    }
}

fn proj(p: Pt) -> Pt {
    let m = (p.0 + p.1) / 2.0;
    (m, m)
}

/// Minimum-cost bijection between `a` and `b` by dynamic programming over
/// subsets of `b` (exhaustive, exponential).
fn min_bijection(a: &[Pt], b: &[Pt]) -> f64 {
    let n = a.len();
    assert_eq!(n, b.len());
    assert!(n <= 16, "oracle limited to 16 points per side");
    let mut best = vec![f64::INFINITY; 1 << n];
    best[0] = 0.0;
    for mask in 0..(1usize << n) {
        if best[mask].is_infinite() {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for (j, &q) in b.iter().enumerate() {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                let c = best[mask] + cost(a[row], q);
                if c < best[next] {
                    best[next] = c;
                }
            }
        }
    }
    best[(1 << n) - 1]
}

/// W2 between diagrams over the literal augmented point sets
/// `Di ∪ Δ(Dj)` and `Dj ∪ Δ(Di)`.
pub fn brute_w2(di: &PersistenceDiagram, dj: &PersistenceDiagram) -> f64 {
    let pi: Vec<Pt> = di.points.iter().map(|p| (p.birth, p.death)).collect();
    let pj: Vec<Pt> = dj.points.iter().map(|p| (p.birth, p.death)).collect();
    let mut left = pi.clone();
    left.extend(pj.iter().map(|&q| proj(q)));
    let mut right = pj.clone();
    right.extend(pi.iter().map(|&p| proj(p)));
    min_bijection(&left, &right).sqrt()
}

/// W^T_2 by enumerating every rooted partial isomorphism: injective maps of
/// left branches to right branches that send the root to the root and
/// commute with the parent relation. Unmapped branches go to the diagonal.
pub fn brute_wt2(bi: &Bdt, bj: &Bdt) -> f64 {
    let left: Vec<Pt> = bi.branches.iter().map(|b| (b.birth, b.death)).collect();
    let right: Vec<Pt> = bj.branches.iter().map(|b| (b.birth, b.death)).collect();
    let diag = |p: Pt| cost(p, proj(p));
    let n = left.len();
    let mut phi: Vec<Option<usize>> = vec![None; n];
    phi[0] = Some(0);
    let mut best = f64::INFINITY;

    fn rec(
        i: usize,
        phi: &mut Vec<Option<usize>>,
        bi: &Bdt,
        bj: &Bdt,
        eval: &dyn Fn(&[Option<usize>]) -> f64,
        best: &mut f64,
    ) {
        if i == phi.len() {
            *best = best.min(eval(phi));
            return;
        }
        phi[i] = None;
        rec(i + 1, phi, bi, bj, eval, best);
        for c in 1..bj.len() {
            if phi.contains(&Some(c)) {
                continue;
            }
            let pl = bi.branches[i].parent.expect("non-root");
            let pr = bj.branches[c].parent.expect("non-root");
            if phi[pl] == Some(pr) {
                phi[i] = Some(c);
                rec(i + 1, phi, bi, bj, eval, best);
                phi[i] = None;
            }
        }
    }

    let eval = |phi: &[Option<usize>]| {
        let mut used = vec![false; right.len()];
        let mut total = 0.0;
        for (i, m) in phi.iter().enumerate() {
            match m {
                Some(c) => {
                    used[*c] = true;
                    total += cost(left[i], right[*c]);
                }
                None => total += diag(left[i]),
            }
        }
        for (c, u) in used.iter().enumerate() {
            if !u {
                total += diag(right[c]);
            }
        }
        total
    };
    rec(1, &mut phi, bi, bj, &eval, &mut best);
    best.sqrt()
}

/// Least-squares `(g, g')` for `r_j ≈ α_j g + (1−α_j) g'`, entry by entry,
/// through an SVD solve of the `N × 2` design matrix.
pub fn lstsq_axis(alphas: &[f64], residuals: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = alphas.len();
    let design = DMatrix::from_fn(n, 2, |j, c| if c == 0 { alphas[j] } else { 1.0 - alphas[j] });
    let svd = design.svd(true, true);
    let len = residuals[0].len();
    let mut g = vec![0.0; len];
    let mut gp = vec![0.0; len];
    for e in 0..len {
        let rhs = DVector::from_fn(n, |j, _| residuals[j][e]);
        let x = svd.solve(&rhs, 1e-14).expect("svd solve");
        g[e] = x[0];
        gp[e] = x[1];
    }
    (g, gp)
}

/// Eigenvalues (decreasing) of a symmetric matrix by a dense solver.
pub fn dense_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let m = DMatrix::from_row_slice(n, n, a);
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Classical MDS through a dense eigen-decomposition; returns the Gram
/// matrix of the `dim`-dimensional embedding, which is basis independent.
pub fn mds_gram(dist: &[Vec<f64>], dim: usize) -> DMatrix<f64> {
    let n = dist.len();
    let d2 = DMatrix::from_fn(n, n, |i, j| dist[i][j] * dist[i][j]);
    let j = DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let b = -0.5 * &j * d2 * &j;
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let mut gram = DMatrix::zeros(n, n);
    for &k in order.iter().take(dim) {
        let lambda = eig.eigenvalues[k].max(0.0);
        let v = eig.eigenvectors.column(k);
        gram += lambda * v * v.transpose();
    }
    gram
}

/// Persistence pairs of a field's sublevel (join) or superlevel (split)
/// components, found by re-flooding the graph at every sweep step. Each
/// local extremum dies when its component first reaches an older vertex;
/// the oldest one dies at the last vertex. Pairs are `(min, max)` intervals.
pub fn brute_pairs(field: &ScalarFieldGrid, kind: TreeKind) -> Vec<(f64, f64)> {
    let n = field.len();
    let key = |v: usize| (field.values[v], v);
    let older = |a: usize, b: usize| kind.cmp_keys(key(a), key(b)) == std::cmp::Ordering::Less;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| kind.cmp_keys(key(a), key(b)));
    let extrema: Vec<usize> = (0..n)
        .filter(|&v| field.neighbors(v).all(|w| older(v, w)))
        .collect();

    let mut pairs = Vec::new();
    for &m in &extrema {
        let mut added = vec![false; n];
        let mut death = field.values[*order.last().expect("non-empty")];
        for &w in &order {
            added[w] = true;
            if !added[m] {
                continue;
            }
            let mut seen = vec![false; n];
            let mut stack = vec![m];
            seen[m] = true;
            let mut found = false;
            while let Some(v) = stack.pop() {
                if older(v, m) {
                    found = true;
                    break;
                }
                for u in field.neighbors(v) {
                    if added[u] && !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            if found {
                death = field.values[w];
                break;
            }
        }
        let b = field.values[m];
        pairs.push((b.min(death), b.max(death)));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pairs
}
