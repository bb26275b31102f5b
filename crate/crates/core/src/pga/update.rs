//! Closed-form axis update for fixed assignments.
//!
//! For every scalar entry, with residuals `r_j` between member targets and
//! the translated base points, the pair `(g, g')` minimizing
//! `Σ_j (r_j − α_j g − (1−α_j) g')²` solves the normal equations
//!
//! ```text
//! [ Σα²      Σα(1−α) ] [g ]   [ Σα r     ]
//! [ Σα(1−α)  Σ(1−α)² ] [g'] = [ Σ(1−α) r ]
//! ```
//!
//! written below in eliminated form.

use super::GeodesicAxis;

#[derive(Debug, Clone, PartialEq)]
pub struct AxisUpdate {
    pub axis: GeodesicAxis,
    /// The normal equations were singular (all `α` equal); the axis was left
    /// unchanged.
    pub degenerate: bool,
}

/// `residuals[j]` holds one entry per axis coordinate for member `j`.
pub fn update_axis(axis: &GeodesicAxis, alphas: &[f64], residuals: &[Vec<f64>]) -> AxisUpdate {
    assert_eq!(alphas.len(), residuals.len());
    let (mut saa, mut sab, mut sbb) = (0.0, 0.0, 0.0);
    for &a in alphas {
        let b = 1.0 - a;
        saa += a * a;
        sab += a * b;
        sbb += b * b;
    }
    let det = saa * sbb - sab * sab;
    if saa == 0.0 || sbb == 0.0 || det <= 1e-12 * saa * sbb {
        return AxisUpdate {
            axis: axis.clone(),
            degenerate: true,
        };
    }
    let len = axis.g.len();
    let mut g = vec![0.0; len];
    let mut g_prime = vec![0.0; len];
    let g_den = saa - sab * sab / sbb;
    let gp_den = sbb - sab * sab / saa;
    for e in 0..len {
        let (mut sar, mut sbr) = (0.0, 0.0);
        for (&a, r) in alphas.iter().zip(residuals) {
            sar += a * r[e];
            sbr += (1.0 - a) * r[e];
        }
        let c = sbr / sbb;
        let d = sar / saa;
        let mut num_g = 0.0;
        let mut num_gp = 0.0;
        for (&a, r) in alphas.iter().zip(residuals) {
            num_g += a * (r[e] - (1.0 - a) * c);
            num_gp += (1.0 - a) * (r[e] - a * d);
        }
        g[e] = num_g / g_den;
        g_prime[e] = num_gp / gp_den;
    }
    AxisUpdate {
        axis: GeodesicAxis { g, g_prime },
        degenerate: false,
    }
}

/// `Σ_j ‖r_j − α_j g − (1−α_j) g'‖²`, the energy the update minimizes.
pub fn individual_energy(axis: &GeodesicAxis, alphas: &[f64], residuals: &[Vec<f64>]) -> f64 {
    alphas
        .iter()
        .zip(residuals)
        .map(|(&a, r)| {
            r.iter()
                .enumerate()
                .map(|(e, &x)| {
                    let d = x - a * axis.g[e] - (1.0 - a) * axis.g_prime[e];
                    d * d
                })
                .sum::<f64>()
        })
        .sum()
}
