//! Exit-gate checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Runs without the libtest harness so the
//! lines are always shown.

use std::process::Command;
use std::time::{Duration, Instant};

use mtpga_core::analysis::{
    compress, decompress, pearson, projected_variances, reconstruction_error, sim_from_distances,
    pairwise_distances, BasisArchive,
};
use mtpga_core::pga::{individual_energy, update_axis, GeodesicAxis, PgaBasis, PgaParams};
use mtpga_core::{
    field_to_bdt, fit_basis, geodesic, interpolate, w2_diagrams, wt2_distance, Bdt,
    EnsembleKind, FitReport, Preprocessing,
};
use mtpga_testkit::fixtures::field_ensemble;
use mtpga_testkit::gen::{bumpy_field, random_bdt_upto, random_diagram, random_ensemble};
use mtpga_testkit::oracle::{brute_w2, brute_wt2, lstsq_axis};
use mtpga_testkit::planted::{planted_ensemble, PlantedDesign};
use mtpga_testkit::rng;
use rand::Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn diagram_oracle() -> Outcome {
    let t = Instant::now();
    let mut r = rng(0xD1A6);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let a = random_diagram(&mut r, 5);
        let b = random_diagram(&mut r, 5);
        worst = worst.max((w2_diagrams(&a, &b).0 - brute_w2(&a, &b)).abs());
    }
    let el = t.elapsed();
    check(
        worst <= 1e-9 && el < Duration::from_secs(30),
        format!("500 pairs, max |diff| {worst:.2e} (tol 1e-9), {:.2} s (limit 30 s)", secs(el)),
    )
}

fn bdt_oracle() -> Outcome {
    let mut r = rng(0xB07);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let a = random_bdt_upto(&mut r, 4);
        let b = random_bdt_upto(&mut r, 4);
        let d = wt2_distance(&a, &b).map_err(|e| e.to_string())?;
        worst = worst.max((d - brute_wt2(&a, &b)).abs());
    }
    check(worst <= 1e-9, format!("200 pairs, max |diff| {worst:.2e} (tol 1e-9)"))
}

fn generalization() -> Outcome {
    let mut r = rng(0x6E4);
    let pre = Preprocessing::default();
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    for _ in 0..100 {
        let fa = bumpy_field(&mut r, 12, 12, 6, 0.05);
        let fb = bumpy_field(&mut r, 12, 12, 6, 0.05);
        let pd = |f| field_to_bdt(f, EnsembleKind::Diagram, &pre).map_err(|e| e.to_string());
        let (a, b) = (pd(&fa)?, pd(&fb)?);
        let d = wt2_distance(&a, &b).map_err(|e| e.to_string())?;
        worst = worst.max((d - w2_diagrams(&a.diagram(), &b.diagram()).0).abs());

        let mt = |f| field_to_bdt(f, EnsembleKind::Join, &pre).map_err(|e| e.to_string());
        let (a, b) = (mt(&fa)?, mt(&fb)?);
        let d = wt2_distance(&a, &b).map_err(|e| e.to_string())?;
        if d < w2_diagrams(&a.diagram(), &b.diagram()).0 - 1e-12 {
            violations += 1;
        }
    }
    check(
        worst <= 1e-9 && violations == 0,
        format!("100 pairs, eps1=1 max |diff| {worst:.2e} (tol 1e-9); eps1=0.05 W^T_2 < W_2 in {violations} pairs"),
    )
}

fn metric_axioms() -> Outcome {
    let mut r = rng(0xA710);
    let (mut sym, mut ident, mut tri): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
    for _ in 0..200 {
        let a = random_bdt_upto(&mut r, 8);
        let b = random_bdt_upto(&mut r, 8);
        let c = random_bdt_upto(&mut r, 8);
        let d = |x: &Bdt, y: &Bdt| wt2_distance(x, y).unwrap();
        sym = sym.max((d(&a, &b) - d(&b, &a)).abs());
        ident = ident.max(d(&a, &a)).max(d(&b, &b));
        tri = tri.min(d(&a, &c) + d(&c, &b) - d(&a, &b));
    }
    check(
        sym <= 1e-12 && ident == 0.0 && tri >= -1e-9,
        format!("200 triples, symmetry {sym:.1e}, identity {ident:.1e}, min triangle slack {tri:.2e} (tol -1e-9)"),
    )
}

fn geodesic_midpoint() -> Outcome {
    let mut r = rng(0x3D);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = random_bdt_upto(&mut r, 8);
        let b = random_bdt_upto(&mut r, 8);
        let g = geodesic(&a, &b).map_err(|e| e.to_string())?;
        for t in [0.25, 0.5, 0.75] {
            let m = interpolate(&g.anchor, &g.vector, t).map_err(|e| e.to_string())?;
            let d = wt2_distance(&a, &m).map_err(|e| e.to_string())?;
            worst = worst.max((d - t * g.distance).abs());
        }
    }
    check(worst <= 1e-6, format!("50 pairs x 3 t, max |diff| {worst:.2e} (tol 1e-6)"))
}

fn axis_update() -> Outcome {
    let mut r = rng(0xAA);
    let (mut ls, mut grad): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let n = r.gen_range(3..16);
        let len = 2 * r.gen_range(1..8);
        let alphas: Vec<f64> = (0..n).map(|_| r.gen()).collect();
        let res: Vec<Vec<f64>> = (0..n).map(|_| (0..len).map(|_| r.gen_range(-1.0..1.0)).collect()).collect();
        let start = GeodesicAxis::zero(len / 2);
        let up = update_axis(&start, &alphas, &res);
        if up.degenerate {
            return Err("unexpected degenerate update".into());
        }
        let (g, gp) = lstsq_axis(&alphas, &res);
        for e in 0..len {
            ls = ls.max((up.axis.g[e] - g[e]).abs()).max((up.axis.g_prime[e] - gp[e]).abs());
        }
        let h = 1e-6;
        let mut g2 = 0.0;
        for e in 0..2 * len {
            let (mut p, mut m) = (up.axis.clone(), up.axis.clone());
            if e < len {
                p.g[e] += h;
                m.g[e] -= h;
            } else {
                p.g_prime[e - len] += h;
                m.g_prime[e - len] -= h;
            }
            let d = (individual_energy(&p, &alphas, &res) - individual_energy(&m, &alphas, &res)) / (2.0 * h);
            g2 += d * d;
        }
        grad = grad.max(g2.sqrt());
    }
    check(
        ls <= 1e-8 && grad <= 1e-5,
        format!("100 instances, max |analytic - lstsq| {ls:.2e} (tol 1e-8), max |FD grad| {grad:.2e} (tol 1e-5)"),
    )
}

fn orthogonality_residuals(basis: &PgaBasis) -> (f64, f64) {
    let dirs: Vec<Vec<f64>> = basis.axes.iter().map(GeodesicAxis::direction).collect();
    let mut dot: f64 = 0.0;
    for i in 0..dirs.len() {
        for j in 0..i {
            dot = dot.max(dirs[i].iter().zip(&dirs[j]).map(|(a, b)| a * b).sum::<f64>().abs());
        }
    }
    let col = basis.axes.iter().map(|a| a.collinearity_residual().abs()).fold(0.0, f64::max);
    (dot, col)
}

fn two_consecutive_increases(report: &FitReport, d_max: usize) -> bool {
    (0..d_max).any(|d| report.dimension_trace(d).windows(3).any(|w| w[1] > w[0] && w[2] > w[1]))
}

fn terminal_above_initial(report: &FitReport, d_max: usize) -> bool {
    (0..d_max).any(|d| {
        let t = report.dimension_trace(d);
        !t.is_empty() && t.last() > t.first()
    })
}

struct FitStats {
    energy_failures: usize,
    slowest: Duration,
    max_dot: f64,
    max_col: f64,
    fits: usize,
}

fn energy_discipline(stats: &mut FitStats) -> Outcome {
    let mut r = rng(0xE6);
    let mut max_branches = 0;
    for _ in 0..20 {
        let ens = random_ensemble(&mut r, 12, 64, 0.05, 0.15);
        max_branches = max_branches.max(ens.iter().map(Bdt::len).max().unwrap_or(0));
        let params = PgaParams::with_defaults(2, &ens);
        let t = Instant::now();
        let (basis, report) = fit_basis(&ens, &params).map_err(|e| e.to_string())?;
        stats.slowest = stats.slowest.max(t.elapsed());
        if two_consecutive_increases(&report, 2) || terminal_above_initial(&report, 2) {
            stats.energy_failures += 1;
        }
        let (dot, col) = orthogonality_residuals(&basis);
        stats.max_dot = stats.max_dot.max(dot);
        stats.max_col = stats.max_col.max(col);
        stats.fits += 1;
    }
    check(
        stats.energy_failures == 0 && stats.slowest < Duration::from_secs(60) && max_branches <= 64,
        format!(
            "20 ensembles (N=12, <= {max_branches} branches), {} with a bad trace, slowest fit {:.2} s (limit 60 s)",
            stats.energy_failures,
            secs(stats.slowest)
        ),
    )
}

fn planted_design(spread_ratio: f64) -> PlantedDesign {
    // Levels on the k/63 sample lattice used with N2 = 64.
    let third = 21.0 / 63.0;
    PlantedDesign {
        branches_per_axis: 3,
        axis_norms: vec![0.02 * spread_ratio, 0.02],
        levels: vec![vec![0.0, third, 2.0 * third, 1.0]; 2],
        static_branches: 2,
    }
}

fn planted_recovery(stats: &mut FitStats) -> Outcome {
    let p = planted_ensemble(&mut rng(0x9A), &planted_design(3.0));
    let mut params = PgaParams::with_defaults(2, &p.members);
    params.n2 = 64;
    let (basis, _) = fit_basis(&p.members, &params).map_err(|e| e.to_string())?;
    let (dot, col) = orthogonality_residuals(&basis);
    stats.max_dot = stats.max_dot.max(dot);
    stats.max_col = stats.max_col.max(col);
    stats.fits += 1;
    let err = reconstruction_error(&p.members, &basis).map_err(|e| e.to_string())?;
    check(
        err.mean <= 1e-3,
        format!("N={} members, N2=64, mean relative error {:.2e} (tol 1e-3)", p.members.len(), err.mean),
    )
}

fn pv_ordering(stats: &mut FitStats) -> Outcome {
    let mut ok = 0;
    let mut worst_ratio = f64::INFINITY;
    for run in 0..20 {
        let p = planted_ensemble(&mut rng(0x9000 + run), &planted_design(3.0));
        let params = PgaParams::with_defaults(2, &p.members);
        let (basis, _) = fit_basis(&p.members, &params).map_err(|e| e.to_string())?;
        let (dot, col) = orthogonality_residuals(&basis);
        stats.max_dot = stats.max_dot.max(dot);
        stats.max_col = stats.max_col.max(col);
        stats.fits += 1;
        let pv = projected_variances(&p.members, &basis).map_err(|e| e.to_string())?;
        if pv[0] > pv[1] {
            ok += 1;
        }
        worst_ratio = worst_ratio.min(pv[0] / pv[1]);
    }
    check(ok == 20, format!("PV(1) > PV(2) in {ok}/20 runs, min ratio {worst_ratio:.3}"))
}

fn orthogonality(stats: &FitStats) -> Outcome {
    check(
        stats.max_dot <= 1e-6 && stats.max_col <= 1e-9,
        format!(
            "{} fits, max |V_i.V_j| {:.2e} (tol 1e-6), max collinearity residual {:.2e} (tol 1e-9)",
            stats.fits, stats.max_dot, stats.max_col
        ),
    )
}

fn codec() -> Outcome {
    let mut r = rng(0xC0DE);
    for i in 0..10 {
        let ens = random_ensemble(&mut r, 8, 16, 0.05, 0.15);
        let d_max = 1 + i % 3;
        let (basis, _) = fit_basis(&ens, &PgaParams::with_defaults(d_max, &ens)).map_err(|e| e.to_string())?;
        let (bytes, stats) = compress(&ens, &basis);
        let back = decompress(&bytes).map_err(|e| e.to_string())?;
        if back != basis || BasisArchive::new(&back).to_bytes() != bytes {
            return Err(format!("ensemble {i}: round trip differs"));
        }
        let nb = basis.origin.len();
        let d = basis.axes.len();
        let input: usize = ens.iter().map(|b| 2 * b.len()).sum();
        let archive = 2 * nb + 2 * d * 2 * nb + ens.len() * d;
        if stats.compression_factor != input as f64 / archive as f64 {
            return Err(format!("ensemble {i}: factor {} != {input}/{archive}", stats.compression_factor));
        }
    }
    Ok("10 ensembles, bit-exact round trip, factor equals scalar-count ratio".into())
}

fn sim_and_correlation() -> Outcome {
    let ens = random_ensemble(&mut rng(0x51), 3, 10, 0.1, 0.2);
    let d = pairwise_distances(&ens).map_err(|e| e.to_string())?;
    let (a, b, c) = (d[0][1], d[0][2], d[1][2]);
    let x = (a * a + b * b - c * c) / (2.0 * a);
    let y = (b * b - x * x).max(0.0).sqrt();
    let sim = sim_from_distances(&[[0.0, 0.0], [a, 0.0], [x, y]], &d);

    let alpha = [0.0, 0.5, 1.0];
    let rho = [
        (pearson(&[1.0, 2.0, 3.0], &alpha), 1.0),
        (pearson(&[3.0, 2.0, 1.0], &alpha), -1.0),
        (pearson(&[1.0, 1.0, 2.0], &alpha), 0.866_025_403_784_438_6),
    ];
    let worst = rho.iter().map(|(g, w)| g.map_or(f64::INFINITY, |g| (g - w).abs())).fold(0.0, f64::max);
    check(
        sim == 1.0 && worst <= 1e-6,
        format!("SIM {sim} (want 1), max rho error {worst:.2e} (tol 1e-6)"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest = field_ensemble(&mut rng(0xDE7), dir.path(), 10, 14, "join");
    let mut archives = Vec::new();
    for (run, threads) in ["1", "1", "8", "8"].iter().enumerate() {
        let out = dir.path().join(format!("basis{run}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_mtpga"))
            .args(["--threads", threads, "fit", "-m"])
            .arg(&manifest)
            .arg("-o")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        archives.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    let same = archives.windows(2).all(|w| w[0] == w[1]);
    check(same, format!("2 runs x {{1, 8}} workers, {} byte archives identical: {same}", archives[0].len()))
}

fn main() -> std::process::ExitCode {
    let mut stats = FitStats {
        energy_failures: 0,
        slowest: Duration::ZERO,
        max_dot: 0.0,
        max_col: 0.0,
        fits: 0,
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("diagram-metric oracle", diagram_oracle()),
        ("BDT-metric oracle", bdt_oracle()),
        ("W^T_2 generalizes W_2", generalization()),
        ("metric axioms", metric_axioms()),
        ("geodesic midpoint", geodesic_midpoint()),
        ("closed-form axis update", axis_update()),
        ("energy discipline", energy_discipline(&mut stats)),
        ("planted-basis recovery", planted_recovery(&mut stats)),
        ("projected-variance ordering", pv_ordering(&mut stats)),
        ("orthogonality", orthogonality(&stats)),
        ("codec", codec()),
        ("SIM and correlation", sim_and_correlation()),
        ("determinism", determinism()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("PASS {:02} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:02} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        std::process::ExitCode::SUCCESS
    } else {
        std::process::ExitCode::FAILURE
    }
}
