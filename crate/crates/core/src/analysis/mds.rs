//! Classical (Torgerson) multidimensional scaling with a cyclic Jacobi
//! eigensolver.

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric row-major `n × n` matrix. Returns the
/// eigenvalues in decreasing order and the matching unit eigenvectors as
/// rows. Each eigenvector's largest-magnitude entry is made positive.
pub fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let total: f64 = m.iter().map(|x| x * x).sum();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off <= 1e-30 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[b * n + b].total_cmp(&m[a * n + a]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| m[k * n + k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut col: Vec<f64> = (0..n).map(|i| v[i * n + k]).collect();
            let lead = col
                .iter()
                .copied()
                .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            if lead < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
            col
        })
        .collect();
    (values, vectors)
}

/// Embeds a distance matrix in `dim` dimensions: double-centre the squared
/// distances, keep the top eigenpairs, scale by `sqrt(λ)`. Eigenvalues at
/// rounding level relative to the largest one count as zero.
pub fn classical_mds(dist: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let n = dist.len();
    if n == 0 {
        return Vec::new();
    }
    let sq: Vec<f64> = dist.iter().flat_map(|row| row.iter().map(|d| d * d)).collect();
    let row_mean: Vec<f64> = (0..n).map(|i| sq[i * n..(i + 1) * n].iter().sum::<f64>() / n as f64).collect();
    let all_mean = row_mean.iter().sum::<f64>() / n as f64;
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] = -0.5 * (sq[i * n + j] - row_mean[i] - row_mean[j] + all_mean);
        }
    }
    let (values, vectors) = symmetric_eigen(&b, n);
    let floor = 1e-12 * values.first().copied().unwrap_or(0.0).abs();
    let mut out = vec![vec![0.0; dim]; n];
    for k in 0..dim.min(n) {
        if values[k] <= floor {
            continue;
        }
        let scale = values[k].sqrt();
        for (i, row) in out.iter_mut().enumerate() {
            row[k] = vectors[k][i] * scale;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalizes_small_matrix() {
        let a = [2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 5.0];
        let (vals, vecs) = symmetric_eigen(&a, 3);
        assert!((vals[0] - 5.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        assert!((vals[2] - 1.0).abs() < 1e-12);
        assert!((vecs[1][0] - vecs[1][1]).abs() < 1e-12);
    }

    #[test]
    fn two_points_embed_at_their_distance() {
        let x = classical_mds(&[vec![0.0, 2.5], vec![2.5, 0.0]], 3);
        let d: f64 = x[0].iter().zip(&x[1]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!((d - 2.5).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_embeds_at_origin() {
        let x = classical_mds(&vec![vec![0.0; 4]; 4], 3);
        assert!(x.iter().flatten().all(|&c| c == 0.0));
    }
}
