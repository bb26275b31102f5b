use crate::bdt::Bdt;
use crate::error::{Error, Result};
use crate::wasserstein::geodesic::snap_unit;

use super::{GeodesicAxis, PgaBasis};

/// Largest `λ ∈ [0,1]` keeping `p + λv` in the closed normalized region
/// `{x ≥ 0, y ≤ 1, x ≤ y}`, assuming `p` is inside.
fn max_step(p: (f64, f64), v: (f64, f64)) -> f64 {
    // Each constraint as (a·v, b − a·p) for a·q ≤ b.
    let constraints = [(-v.0, p.0), (v.1, 1.0 - p.1), (v.0 - v.1, p.1 - p.0)];
    let mut lambda: f64 = 1.0;
    for (av, slack) in constraints {
        if av > 0.0 {
            lambda = lambda.min((slack / av).max(0.0));
        }
    }
    lambda
}

/// Moves one branch along an axis. Both extremities `p + λg` and `p + λg'`
/// are kept valid by a common rescaling `λ`, so every point between them is
/// valid too.
fn step_branch(p: (f64, f64), g: (f64, f64), gp: (f64, f64), alpha: f64) -> (f64, f64) {
    let lambda = max_step(p, g).min(max_step(p, gp));
    let dx = alpha * g.0 + (1.0 - alpha) * gp.0;
    let dy = alpha * g.1 + (1.0 - alpha) * gp.1;
    let mut x = snap_unit(p.0 + lambda * dx).clamp(0.0, 1.0);
    let mut y = snap_unit(p.1 + lambda * dy).clamp(0.0, 1.0);
    if x > y {
        let m = 0.5 * (x + y);
        x = m;
        y = m;
    }
    (x, y)
}

/// Applies one axis at coordinate `alpha` to `base`, whose branches must
/// correspond one-to-one with the axis entries. The root stays at `(0,1)`.
pub fn translate_step(base: &Bdt, axis: &GeodesicAxis, alpha: f64) -> Bdt {
    let mut out = base.clone();
    for (i, b) in out.branches.iter_mut().enumerate().skip(1) {
        let g = (axis.g[2 * i], axis.g[2 * i + 1]);
        let gp = (axis.g_prime[2 * i], axis.g_prime[2 * i + 1]);
        (b.birth, b.death) = step_branch((b.birth, b.death), g, gp, alpha);
    }
    out
}

/// Reconstruction from an origin and the leading `alpha.len()` axes.
pub fn reconstruct_from(origin: &Bdt, axes: &[GeodesicAxis], alpha: &[f64]) -> Result<Bdt> {
    if alpha.len() > axes.len() {
        return Err(Error::TooManyCoordinates {
            got: alpha.len(),
            d_max: axes.len(),
        });
    }
    if let Some(a) = alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::AlphaOutOfRange(a.to_string()));
    }
    origin.check_normalized(false)?;
    for axis in axes.iter().take(alpha.len()) {
        if axis.g.len() != 2 * origin.len() || axis.g_prime.len() != 2 * origin.len() {
            return Err(Error::DimensionMismatch {
                expected: 2 * origin.len(),
                got: axis.g.len().max(axis.g_prime.len()),
            });
        }
    }
    let mut out = origin.clone();
    for (axis, &a) in axes.iter().zip(alpha) {
        out = translate_step(&out, axis, a);
    }
    Ok(out)
}

pub fn reconstruct(basis: &PgaBasis, alpha: &[f64]) -> Result<Bdt> {
    reconstruct_from(&basis.origin, &basis.axes, alpha)
}

/// Materialized extremity of a single axis: `E` at `alpha = 1`, `E'` at 0.
pub fn extremity(origin: &Bdt, axis: &GeodesicAxis, alpha: f64) -> Bdt {
    translate_step(origin, axis, alpha)
}
