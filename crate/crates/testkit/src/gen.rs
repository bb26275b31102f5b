use mtpga_core::{Bdt, Branch, PersistenceDiagram, ScalarFieldGrid};
use rand::Rng;

/// Diagram of up to `max_points` points in `[0,1]²`; about one point in ten
/// lies on the diagonal.
pub fn random_diagram<R: Rng>(rng: &mut R, max_points: usize) -> PersistenceDiagram {
    let n = rng.gen_range(0..=max_points);
    (0..n)
        .map(|_| {
            let b: f64 = rng.gen();
            if rng.gen_bool(0.1) {
                (b, b)
            } else {
                (b, b + rng.gen::<f64>() * (1.0 - b))
            }
        })
        .collect()
}

fn random_interval<R: Rng>(rng: &mut R) -> (f64, f64) {
    loop {
        let a: f64 = rng.gen();
        let b: f64 = rng.gen();
        if a != b {
            return (a.min(b), a.max(b));
        }
    }
}

/// Normalized BDT with `n_branches` branches (root included); every
/// non-root branch picks a uniformly random earlier parent.
pub fn random_bdt<R: Rng>(rng: &mut R, n_branches: usize) -> Bdt {
    let children = (1..n_branches.max(1))
        .map(|i| {
            let (birth, death) = random_interval(rng);
            Branch {
                birth,
                death,
                parent: Some(rng.gen_range(0..i)),
            }
        })
        .collect();
    let lo: f64 = rng.gen_range(-1.0..1.0);
    Bdt::normalized_from(children, [lo, lo + rng.gen_range(0.5..2.0)]).expect("valid")
}

/// Like `random_bdt` with a branch count drawn from `1..=max_branches`.
pub fn random_bdt_upto<R: Rng>(rng: &mut R, max_branches: usize) -> Bdt {
    let n = rng.gen_range(1..=max_branches);
    random_bdt(rng, n)
}

/// Normalized BDT with every branch attached to the root.
pub fn random_flat_bdt<R: Rng>(rng: &mut R, n_branches: usize) -> Bdt {
    let children = (1..n_branches.max(1))
        .map(|_| {
            let (birth, death) = random_interval(rng);
            Branch {
                birth,
                death,
                parent: Some(0),
            }
        })
        .collect();
    Bdt::normalized_from(children, [0.0, 1.0]).expect("valid")
}

/// Members sharing a template: every template branch is jittered by up to
/// `jitter` and dropped with probability `drop`; a few fresh branches are
/// added. Branch counts stay at most `max_branches`.
pub fn random_ensemble<R: Rng>(
    rng: &mut R,
    n_members: usize,
    max_branches: usize,
    jitter: f64,
    drop: f64,
) -> Vec<Bdt> {
    let size = rng.gen_range(max_branches / 2..=max_branches - 2).max(2);
    let template = random_bdt(rng, size);
    (0..n_members)
        .map(|_| {
            let mut keep = vec![true; template.len()];
            let mut branches = template.branches.clone();
            for i in 1..template.len() {
                let p = branches[i].parent.expect("non-root");
                keep[i] = keep[p] && !rng.gen_bool(drop);
                let b = &mut branches[i];
                let mut x = (b.birth + rng.gen_range(-jitter..=jitter)).clamp(0.0, 1.0);
                let mut y = (b.death + rng.gen_range(-jitter..=jitter)).clamp(0.0, 1.0);
                if x >= y {
                    let m = 0.5 * (x + y);
                    x = (m - 1e-3).max(0.0);
                    y = (m + 1e-3).min(1.0);
                }
                b.birth = x;
                b.death = y;
            }
            let mut member = Bdt {
                branches,
                normalized: true,
                root_interval: template.root_interval,
            }
            .retain(&keep);
            let extra = rng.gen_range(0..=2).min(max_branches - member.len());
            for _ in 0..extra {
                let parent = rng.gen_range(0..member.len());
                let (birth, death) = random_interval(rng);
                member.branches.push(Branch {
                    birth,
                    death,
                    parent: Some(parent),
                });
            }
            member
        })
        .collect()
}

/// Field with values uniform in `[0,1)`, or drawn from `levels` distinct
/// values when `levels > 0` (to exercise ties).
pub fn random_field<R: Rng>(rng: &mut R, dims: [usize; 3], levels: usize) -> ScalarFieldGrid {
    let n = dims[0] * dims[1] * dims[2];
    let values = (0..n)
        .map(|_| {
            if levels > 0 {
                rng.gen_range(0..levels) as f64 / levels as f64
            } else {
                rng.gen()
            }
        })
        .collect();
    ScalarFieldGrid::new(dims, values, "random").expect("valid dims")
}

/// Smooth-ish field: a few random bumps over a 2D grid plus noise.
pub fn bumpy_field<R: Rng>(rng: &mut R, nx: usize, ny: usize, bumps: usize, noise: f64) -> ScalarFieldGrid {
    let centres: Vec<(f64, f64, f64, f64)> = (0..bumps)
        .map(|_| {
            (
                rng.gen_range(0.0..nx as f64),
                rng.gen_range(0.0..ny as f64),
                rng.gen_range(0.3..1.0),
                rng.gen_range(1.0..3.0),
            )
        })
        .collect();
    let mut values = Vec::with_capacity(nx * ny);
    for y in 0..ny {
        for x in 0..nx {
            let mut v = 0.0;
            for &(cx, cy, h, w) in &centres {
                let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                v -= h * (-d2 / (2.0 * w * w)).exp();
            }
            v += noise * rng.gen::<f64>();
            values.push(v);
        }
    }
    ScalarFieldGrid::new([nx, ny, 1], values, "bumps").expect("valid dims")
}
