use mtpga_core::analysis::{projected_variances, reconstruction_error};
use mtpga_core::pga::{
    fit_basis, individual_energy, reconstruct, update_axis, GeodesicAxis, PgaBasis, PgaParams,
};
use mtpga_core::{Bdt, FitReport};
use mtpga_testkit::gen::random_ensemble;
use mtpga_testkit::oracle::lstsq_axis;
use mtpga_testkit::planted::{planted_ensemble, PlantedDesign};
use mtpga_testkit::rng;
use proptest::prelude::*;
use rand::Rng;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_basis(basis: &PgaBasis, report: &FitReport, members: usize) {
    let dirs: Vec<Vec<f64>> = basis.axes.iter().map(GeodesicAxis::direction).collect();
    for i in 0..dirs.len() {
        assert!(basis.axes[i].collinearity_residual().abs() <= 1e-9);
        for j in 0..i {
            assert!(dot(&dirs[i], &dirs[j]).abs() <= 1e-6, "axes {i},{j} not orthogonal");
        }
    }
    let n2 = basis.params.n2;
    assert_eq!(basis.coords.len(), members);
    for a in &basis.coords {
        assert_eq!(a.len(), basis.axes.len());
        for &x in a {
            let k = x * (n2 - 1) as f64;
            assert!((0.0..=1.0).contains(&x) && (k - k.round()).abs() < 1e-9);
        }
        reconstruct(basis, a).unwrap().check_normalized(false).unwrap();
    }
    for d in 0..basis.axes.len() {
        let trace = report.dimension_trace(d);
        assert!(!trace.is_empty());
        for w in trace.windows(3) {
            assert!(!(w[1] > w[0] && w[2] > w[1]), "two consecutive increases: {trace:?}");
        }
        assert!(trace.last().unwrap() <= trace.first().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn update_is_the_least_squares_minimizer(seed in any::<u64>(), n in 3usize..12, len in 2usize..12) {
        let mut r = rng(seed);
        let alphas: Vec<f64> = (0..n).map(|_| r.gen()).collect();
        let residuals: Vec<Vec<f64>> = (0..n).map(|_| (0..len).map(|_| r.gen_range(-1.0..1.0)).collect()).collect();
        let start = GeodesicAxis { g: vec![0.0; len], g_prime: vec![0.0; len] };
        let up = update_axis(&start, &alphas, &residuals);
        prop_assert!(!up.degenerate);
        let (g, gp) = lstsq_axis(&alphas, &residuals);
        for e in 0..len {
            prop_assert!((up.axis.g[e] - g[e]).abs() <= 1e-8);
            prop_assert!((up.axis.g_prime[e] - gp[e]).abs() <= 1e-8);
        }
        let h = 1e-6;
        let mut grad2 = 0.0;
        for e in 0..2 * len {
            let mut plus = up.axis.clone();
            let mut minus = up.axis.clone();
            let (p, m) = if e < len {
                (&mut plus.g[e], &mut minus.g[e])
            } else {
                (&mut plus.g_prime[e - len], &mut minus.g_prime[e - len])
            };
            *p += h;
            *m -= h;
            let d = (individual_energy(&plus, &alphas, &residuals) - individual_energy(&minus, &alphas, &residuals)) / (2.0 * h);
            grad2 += d * d;
        }
        prop_assert!(grad2.sqrt() <= 1e-5);
    }
}

#[test]
fn update_leaves_axis_when_alphas_coincide() {
    let axis = GeodesicAxis { g: vec![0.1, 0.2], g_prime: vec![-0.1, 0.0] };
    let up = update_axis(&axis, &[0.5, 0.5, 0.5], &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]);
    assert!(up.degenerate);
    assert_eq!(up.axis, axis);
}

#[test]
fn fits_respect_constraints() {
    for seed in 0..6 {
        let mut r = rng(seed);
        let ens = random_ensemble(&mut r, 12, 16, 0.05, 0.15);
        let params = PgaParams::with_defaults(2, &ens);
        let (basis, report) = fit_basis(&ens, &params).unwrap();
        check_basis(&basis, &report, ens.len());
    }
}

fn planted(seed: u64) -> (Vec<Bdt>, PgaBasis) {
    let third = 21.0 / 63.0;
    let design = PlantedDesign {
        branches_per_axis: 3,
        axis_norms: vec![0.06, 0.02],
        levels: vec![vec![0.0, third, 2.0 * third, 1.0]; 2],
        static_branches: 2,
    };
    let p = planted_ensemble(&mut rng(seed), &design);
    let mut params = PgaParams::with_defaults(2, &p.members);
    params.n2 = 64;
    let (basis, report) = fit_basis(&p.members, &params).unwrap();
    check_basis(&basis, &report, p.members.len());
    (p.members, basis)
}

#[test]
fn planted_basis_is_recovered() {
    for seed in 0..3 {
        let (members, basis) = planted(seed);
        let err = reconstruction_error(&members, &basis).unwrap();
        assert!(err.mean <= 1e-3, "seed {seed}: {}", err.mean);
        let pv = projected_variances(&members, &basis).unwrap();
        assert!(pv[0] > pv[1], "seed {seed}: {pv:?}");
        // Three times the spread gives nine times the variance.
        assert!((pv[0] / pv[1] - 9.0).abs() < 1e-6, "{pv:?}");
    }
}

#[test]
fn identical_members_give_zero_axes() {
    let mut r = rng(3);
    let b = mtpga_testkit::gen::random_bdt(&mut r, 5);
    let ens = vec![b; 4];
    let params = PgaParams::with_defaults(2, &ens);
    let (basis, report) = fit_basis(&ens, &params).unwrap();
    assert!(basis.axes.iter().all(GeodesicAxis::is_zero));
    assert!(basis.coords.iter().flatten().all(|&a| a == 0.0));
    assert_eq!(report.degenerate_axes, vec![true, true]);
    assert_eq!(basis.axis_lengths, vec![0.0, 0.0]);
}

#[test]
fn thread_count_does_not_change_the_fit() {
    let ens = random_ensemble(&mut rng(11), 12, 16, 0.05, 0.15);
    let params = PgaParams::with_defaults(2, &ens);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| fit_basis(&ens, &params).unwrap().0)
    };
    assert_eq!(run(1), run(8));
}
