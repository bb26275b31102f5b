//! Constraints applied after every update: each vector must be a geodesic
//! from the origin, `g` and `g'` must be negatively collinear, and the
//! direction `V = g − g'` must be orthogonal to the previous directions.

use crate::bdt::Bdt;
use crate::error::Result;
use crate::wasserstein::restricted_geodesic;

use super::reconstruct::translate_step;
use super::{dot, norm, GeodesicAxis};

pub const CONSTRAINT_ITERATIONS: usize = 4;

/// Below this norm a direction counts as zero.
const ZERO_NORM: f64 = 1e-12;

fn materialize(origin: &Bdt, v: &[f64]) -> Bdt {
    let axis = GeodesicAxis {
        g: v.to_vec(),
        g_prime: v.to_vec(),
    };
    translate_step(origin, &axis, 1.0)
}

/// Replaces `g` (then `g'`) by the geodesic from the origin to the BDT it
/// points at, re-optimizing the assignment.
pub fn enforce_geodesic(axis: &GeodesicAxis, origin: &Bdt) -> Result<GeodesicAxis> {
    let (g, _) = restricted_geodesic(origin, &materialize(origin, &axis.g))?;
    let (g_prime, _) = restricted_geodesic(origin, &materialize(origin, &axis.g_prime))?;
    Ok(GeodesicAxis { g, g_prime })
}

fn rebuild(v: &[f64], beta: f64) -> GeodesicAxis {
    GeodesicAxis {
        g: v.iter().map(|x| beta * x).collect(),
        g_prime: v.iter().map(|x| -(1.0 - beta) * x).collect(),
    }
}

/// `β' = ‖g‖ / (‖g‖ + ‖g'‖)`, or `None` when both vectors vanish.
fn beta(axis: &GeodesicAxis) -> Option<f64> {
    let (a, b) = (norm(&axis.g), norm(&axis.g_prime));
    (a + b > 0.0).then(|| a / (a + b))
}

/// `g ← β'V`, `g' ← −(1−β')V`. Returns the axis and whether it degenerated.
pub fn enforce_collinearity(axis: &GeodesicAxis) -> (GeodesicAxis, bool) {
    let v = axis.direction();
    match beta(axis) {
        Some(b) if norm(&v) > ZERO_NORM => (rebuild(&v, b), false),
        _ => (GeodesicAxis::zero(axis.g.len() / 2), true),
    }
}

/// Gram–Schmidt of `V` against the previous directions, keeping `β'`.
pub fn enforce_orthogonality(axis: &GeodesicAxis, previous: &[GeodesicAxis]) -> (GeodesicAxis, bool) {
    let Some(b) = beta(axis) else {
        return (GeodesicAxis::zero(axis.g.len() / 2), true);
    };
    let mut v = axis.direction();
    let before = norm(&v);
    for prev in previous {
        let u = prev.direction();
        let uu = dot(&u, &u);
        if uu > 0.0 {
            let c = dot(&v, &u) / uu;
            for (x, y) in v.iter_mut().zip(&u) {
                *x -= c * y;
            }
        }
    }
    let after = norm(&v);
    if after <= ZERO_NORM || after <= ZERO_NORM * before {
        return (GeodesicAxis::zero(axis.g.len() / 2), true);
    }
    (rebuild(&v, b), false)
}

/// The fixed number of geodesic / collinearity / orthogonality rounds.
/// Returns the constrained axis and whether it collapsed to zero.
pub fn constraint_loop(
    axis: &GeodesicAxis,
    origin: &Bdt,
    previous: &[GeodesicAxis],
) -> Result<(GeodesicAxis, bool)> {
    let mut axis = axis.clone();
    for _ in 0..CONSTRAINT_ITERATIONS {
        axis = enforce_geodesic(&axis, origin)?;
        let (a, degenerate) = enforce_collinearity(&axis);
        if degenerate {
            return Ok((a, true));
        }
        let (a, degenerate) = enforce_orthogonality(&a, previous);
        if degenerate {
            return Ok((a, true));
        }
        axis = a;
    }
    Ok((axis, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(g: &[f64], gp: &[f64]) -> GeodesicAxis {
        GeodesicAxis {
            g: g.to_vec(),
            g_prime: gp.to_vec(),
        }
    }

    #[test]
    fn collinearity_examples() {
        let (a, d) = enforce_collinearity(&axis(&[2.0, 0.0], &[-1.0, 0.0]));
        assert!(!d);
        assert!((a.g[0] - 2.0).abs() < 1e-15 && (a.g_prime[0] + 1.0).abs() < 1e-15);

        let (a, _) = enforce_collinearity(&axis(&[2.0, 0.0], &[0.0, 1.0]));
        let expect_g = [4.0 / 3.0, -2.0 / 3.0];
        let expect_gp = [-2.0 / 3.0, 1.0 / 3.0];
        for e in 0..2 {
            assert!((a.g[e] - expect_g[e]).abs() < 1e-15);
            assert!((a.g_prime[e] - expect_gp[e]).abs() < 1e-15);
        }
        assert!(a.collinearity_residual().abs() < 1e-9);

        let (_, d) = enforce_collinearity(&axis(&[1.0, 1.0], &[1.0, 1.0]));
        assert!(d);
    }

    #[test]
    fn orthogonality_examples() {
        let v1 = axis(&[1.0, 0.0, 0.0, 0.0], &[0.0; 4]);
        let (a, d) = enforce_orthogonality(&axis(&[1.0, 1.0, 0.0, 0.0], &[0.0; 4]), &[v1.clone()]);
        assert!(!d);
        assert_eq!(a.direction(), vec![0.0, 1.0, 0.0, 0.0]);

        let already = axis(&[0.0, 0.5, 0.0, 0.0], &[0.0, -0.5, 0.0, 0.0]);
        let (a, _) = enforce_orthogonality(&already, &[v1.clone()]);
        assert_eq!(a, already);

        let (_, d) = enforce_orthogonality(&v1, &[v1.clone()]);
        assert!(d);
    }
}
