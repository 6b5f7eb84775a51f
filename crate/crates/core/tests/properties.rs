use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use svnoise::bounds::{
    block_norm_bound, min_samples_per_symbol, mpsk_feasibility, probability_floor, theorem_bound,
    weyl_gaps, BoundInputs, Verdict,
};
use svnoise::linalg::{spectral_norm, split_blocks};
use svnoise::montecarlo::{
    coverage_report, random_orthogonal, run_trial, sample_noise, CoverageVerdict, NoiseScenario,
};
use svnoise::mpsk::{mean_shift, MeanShiftOptions};
use svnoise::spectral::{
    build_correctors, diagonalize, gaussian_predictor, joint_alignment_objective,
    procrustes_rotation, rotate_noise, SpectralSplit, Tolerances,
};

fn split(n: usize, spectrum: &[f64], seed: u64) -> SpectralSplit {
    SpectralSplit::from_factors(
        &random_orthogonal(n, seed),
        &DVector::from_column_slice(spectrum),
        &random_orthogonal(n, seed ^ 0x9e37_79b9),
        &Tolerances::default(),
    )
    .unwrap()
}

fn spectrum(k: usize) -> Vec<f64> {
    (0..k).map(|i| 3.0 - i as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn rotated_noise_round_trips(n in 3usize..12, k in 1usize..3, seed in any::<u64>()) {
        prop_assume!(k < n);
        let s = split(n, &spectrum(k), seed);
        let w = sample_noise(n, seed.wrapping_add(7));
        let c = rotate_noise(&s, &w).unwrap();
        let back = s.u() * c.assemble() * s.v().transpose();
        prop_assert!((back - &w).amax() < 1e-12);
    }

    #[test]
    fn predictor_lies_outside_u1(n in 3usize..12, seed in any::<u64>()) {
        let s = split(n, &[2.0, 1.0], seed);
        let p = gaussian_predictor(&s, &sample_noise(n, seed)).unwrap();
        prop_assert!((s.u1().transpose() * p).amax() < 1e-12);
    }

    #[test]
    fn procrustes_is_minimal(n in 4usize..10, seed in any::<u64>(), eps in 1e-3f64..0.2) {
        let s = split(n, &[2.0, 1.0], seed);
        let perturb = |m: &DMatrix<f64>, off: u64| {
            let q = random_orthogonal(n, seed.wrapping_add(off)).columns(0, 2).into_owned();
            let x = m + q * eps;
            svnoise::linalg::qr_positive(&x).0
        };
        let u_noisy = perturb(s.u1(), 1);
        let v_noisy = perturb(s.v1(), 2);
        let best = procrustes_rotation(s.u1(), &u_noisy, s.v1(), &v_noisy).unwrap();
        for t in 0..8 {
            let m = random_orthogonal(2, seed.wrapping_add(100 + t));
            let other = joint_alignment_objective(s.u1(), &u_noisy, s.v1(), &v_noisy, &m);
            prop_assert!(best.objective <= other + 1e-12);
        }
    }

    #[test]
    fn weyl_holds(n in 2usize..15, seed in any::<u64>(), scale in 0.0f64..3.0) {
        let a = sample_noise(n, seed) * 4.0;
        let e = sample_noise(n, seed.wrapping_add(1)) * scale;
        prop_assert!(weyl_gaps(&a, &e).unwrap().holds(1e-12));
    }

    #[test]
    fn block_norm_bound_dominates(n in 3usize..15, k in 1usize..3, seed in any::<u64>()) {
        prop_assume!(k < n);
        let t = sample_noise(n, seed);
        let (a11, a12, a21, a22) = split_blocks(&t, k);
        let b = block_norm_bound(
            spectral_norm(&a11),
            spectral_norm(&a12),
            spectral_norm(&a21),
            spectral_norm(&a22),
        );
        prop_assert!(spectral_norm(&t) <= b + 1e-12);
    }

    #[test]
    fn rhs_grows_with_noise(eps in 1e-6f64..1e-2, n in 50usize..500, u1_max in 0.05f64..1.0) {
        let at = |e: f64| theorem_bound(&BoundInputs {
            eps: e,
            n,
            k: 2,
            gamma: 1.0,
            beta: 0.45,
            sigma1: vec![20.0, 10.0],
            u1_max,
        }).unwrap();
        let (lo, hi) = (at(eps), at(2.0 * eps));
        prop_assume!(lo.valid && hi.valid);
        prop_assert!(hi.rhs.unwrap() > lo.rhs.unwrap());
        prop_assert!(lo.rhs.unwrap() > 0.0);
    }

    #[test]
    fn probability_floor_below_one(n in 3usize..10_000, k in 1usize..3, beta in 0.01f64..0.49, gamma in 0.0f64..3.0) {
        prop_assume!(k < n);
        prop_assert!(probability_floor(n, k, beta, gamma) <= 1.0);
    }

    #[test]
    fn vacuous_floor_never_judged(floor in -5.0f64..=0.0, covered in proptest::collection::vec(any::<bool>(), 1..30)) {
        let s = NoiseScenario::new(8, &[2.0], 0.0);
        let mut recs: Vec<_> = (0..covered.len()).map(|i| run_trial(&s, i).unwrap()).collect();
        for (r, c) in recs.iter_mut().zip(&covered) {
            r.covered = *c;
        }
        prop_assert_eq!(coverage_report(&recs, floor).verdict, CoverageVerdict::SkippedVacuous);
    }

    #[test]
    fn min_samples_is_tight(alpha in 0.05f64..1.9) {
        let l = min_samples_per_symbol(alpha).unwrap() as usize;
        prop_assert_eq!(mpsk_feasibility(alpha, l).unwrap().verdict, Verdict::Feasible);
        if l > 1 {
            prop_assert!(2.0 / ((l - 1) as f64).sqrt() > alpha * (1.0 + 1e-9));
        }
    }

    #[test]
    fn mean_shift_assignments_are_modes(
        pts in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..60),
        radius in 0.05f64..2.0,
    ) {
        let points: Vec<[f64; 2]> = pts.into_iter().map(|(x, y)| [x, y]).collect();
        let r = mean_shift(&points, radius, &MeanShiftOptions::default()).unwrap();
        prop_assert_eq!(r.modes.len(), r.m_hat);
        prop_assert!(r.m_hat >= 1 && r.m_hat <= points.len());
        prop_assert!(r.assignments.iter().all(|&a| a < r.m_hat));
    }
}

#[test]
fn off_diagonal_residual_scales_cubically() {
    let s = split(12, &[3.0, 1.5], 5);
    let c = rotate_noise(&s, &sample_noise(12, 6)).unwrap();
    let off = |eps: f64| {
        let pair = build_correctors(&c, s.sigma1(), eps).unwrap();
        diagonalize(&c, s.sigma1(), &pair, eps).off_diagonal_max
    };
    let ratio = off(1e-2) / off(1e-3);
    assert!((300.0..3000.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn corrector_orthogonality_defect_is_second_order() {
    let s = split(12, &[3.0, 1.5], 8);
    let c = rotate_noise(&s, &sample_noise(12, 9)).unwrap();
    let defect = |eps: f64| {
        let p = build_correctors(&c, s.sigma1(), eps).unwrap().p;
        (p.transpose() * &p - DMatrix::identity(12, 12)).amax()
    };
    let ratio = defect(1e-2) / defect(1e-3);
    assert!((30.0..300.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn trials_are_reproducible() {
    let mut s = NoiseScenario::new(30, &[2.0, 1.0], 1e-3);
    s.noise_seed = 42;
    for i in [0, 3, 17] {
        assert_eq!(run_trial(&s, i).unwrap(), run_trial(&s, i).unwrap());
    }
    let other = NoiseScenario { noise_seed: 43, ..s.clone() };
    assert_ne!(run_trial(&s, 0).unwrap(), run_trial(&other, 0).unwrap());
}

#[test]
fn gaussian_term_dominates_as_noise_shrinks() {
    let ratio = |eps: f64| {
        let mut s = NoiseScenario::new(60, &[2.0, 1.0], eps);
        s.trials = 20;
        let recs: Vec<_> = (0..20).map(|i| run_trial(&s, i).unwrap()).collect();
        let mut r: Vec<f64> = recs.iter().map(|r| r.resid_max / r.gauss_term_max).collect();
        r.sort_by(f64::total_cmp);
        r[10]
    };
    let (a, b, c) = (ratio(1e-1), ratio(1e-2), ratio(1e-3));
    assert!(a > b && b > c, "{a} {b} {c}");
    assert!(c < 0.01);
}
