use proptest::prelude::*;
use qspectra::numerics::sigma_min;
use qspectra::quat::{seeded_rng, Quaternion, SimilaritySphere, UnitQuaternion};
use qspectra::spectral::{
    classify_parts_finite, conjugation_symmetry, right_spectrum, s_spectrum, slice_scan,
    verify_ball_containment, verify_factorization, MembershipOracle, Part, SpectralConfig,
    SpectralError, Window,
};
use qspectra::QMatrix;
use rand::Rng;

fn config() -> SpectralConfig {
    SpectralConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    // sign of sigma_min(T_lambda) - tol agrees with the eigen-sphere set away from its boundary
    #[test]
    fn routes_agree_on_random_points(n in 1usize..9, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let t = QMatrix::random(n, &mut rng);
        let report = s_spectrum(&t, &config()).unwrap();
        let oracle = MembershipOracle::new(&t, config().tol).unwrap();
        let tol = oracle.tolerances().membership;
        for _ in 0..4 {
            let lambda = Quaternion::random_normal(&mut rng) * oracle.norm().max(1.0);
            let d = report.distance_to_spectrum(lambda.similarity_class());
            if d < 10.0 * tol {
                continue;
            }
            let v = oracle.verdict(lambda).unwrap();
            prop_assert!(!v.in_right_spectrum, "{v:?} at distance {d}");
        }
        for entry in &report.spheres {
            let lambda = qspectra::quat::sample_sphere_with(entry.sphere(), &mut rng);
            prop_assert!(oracle.verdict(lambda).unwrap().in_right_spectrum);
        }
    }

    #[test]
    fn sigma_min_is_conjugation_invariant(n in 1usize..6, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let t = QMatrix::random(n, &mut rng);
        let lambda = Quaternion::random_normal(&mut rng);
        let s = UnitQuaternion::random(&mut rng);
        prop_assert!(conjugation_symmetry(&t, lambda, s).unwrap() <= 1e-8);
    }

    #[test]
    fn factorization_residual(n in 1usize..7, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let t = QMatrix::random(n, &mut rng);
        let lambda = Quaternion::random_normal(&mut rng);
        prop_assert!(verify_factorization(&t, lambda, 5, &mut rng).unwrap().max_residual <= 1e-10);
    }

    #[test]
    fn finite_partition_is_all_point(n in 1usize..7, seed in any::<u64>()) {
        let t = QMatrix::random(n, &mut seeded_rng(seed));
        let r = classify_parts_finite(&t, right_spectrum(&t, &config()).unwrap()).unwrap();
        prop_assert!(r.spheres.iter().all(|s| s.part == Part::Point));
        prop_assert_eq!(r.total_multiplicity(), n);
        for s in &r.spheres {
            prop_assert!(s.witness_residual.unwrap() <= r.tolerances.membership);
        }
    }

    #[test]
    fn reports_are_deterministic(n in 1usize..6, seed in any::<u64>()) {
        let t = QMatrix::random(n, &mut seeded_rng(seed));
        let cfg = SpectralConfig { seed, ..config() };
        let a = serde_json::to_string(&right_spectrum(&t, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&right_spectrum(&t, &cfg).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn ball_containment_on_random_matrices() {
    let mut rng = seeded_rng(2024);
    for _ in 0..20 {
        let n = rng.random_range(1..=6);
        let t = QMatrix::random(n, &mut rng);
        let report = right_spectrum(&t, &config()).unwrap();
        let check = verify_ball_containment(&t, &report).unwrap();
        assert!(check.passed, "{check:?}");
        for s in &report.spheres {
            let bound = report.norm_bound.powi(2) + report.tolerances.membership;
            assert!(s.re * s.re + s.im_radius * s.im_radius <= bound);
        }
    }
}

#[test]
fn hermitian_spectra_are_real() {
    let mut rng = seeded_rng(77);
    for n in 1..=6 {
        let t = QMatrix::random_hermitian(n, &mut rng);
        let report = right_spectrum(&t, &config()).unwrap();
        for s in &report.spheres {
            assert!(s.im_radius <= 1e-7 * report.tolerances.scale, "{s:?}");
        }
    }
}

#[test]
fn mismatch_error_reports_both_values() {
    let e = SpectralError::SpectrumMismatch {
        lambda: Quaternion::I,
        sigma_min_t_lambda: 0.5,
        sigma_min_delta: 0.25,
        expected_member: true,
    };
    let text = e.to_string();
    assert!(text.contains("5e-1") && text.contains("2.5e-1") && text.contains("a member"), "{text}");
}

#[test]
fn scan_of_i_bottoms_out_at_the_sphere() {
    let t = QMatrix::from_diagonal(&[Quaternion::I]);
    let grid = slice_scan(&t, Window::new(-2.0, 2.0, 0.0, 2.0).unwrap(), 64, 64).unwrap();
    assert_eq!(grid.points.len(), 4096);
    let p = grid.argmin_t_lambda().unwrap();
    let (dx, dy) = grid.cell_size();
    assert!(p.re.abs() <= dx && (p.im - 1.0).abs() <= dy, "{p:?}");
    // sigma_min(T_lambda) for T = [i] is the distance to the sphere in the half-plane
    for q in &grid.points {
        let d = SimilaritySphere::new(q.re, q.im).distance(SimilaritySphere::new(0.0, 1.0));
        assert!((q.sigma_min_t_lambda - d).abs() < 1e-12, "{q:?}");
    }
}

#[test]
fn scan_is_independent_of_worker_count() {
    let t = QMatrix::random(3, &mut seeded_rng(5));
    let w = Window::new(-1.0, 1.5, 0.0, 2.0).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| slice_scan(&t, w, 9, 7).unwrap().to_csv())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn delta_route_agrees_with_t_lambda_bounds() {
    // sigma_min(T_lambda)^2 <= sigma_min(Delta) <= (||T|| + |lambda|) sigma_min(T_lambda)
    let mut rng = seeded_rng(8);
    for _ in 0..20 {
        let t = QMatrix::random(3, &mut rng);
        let lambda = Quaternion::random_normal(&mut rng);
        let st = t.build_t_lambda(lambda).sigma_min().unwrap();
        let sd = sigma_min(t.build_delta(lambda).real_embed().matrix()).unwrap().value;
        let upper = (t.norm().unwrap() + lambda.norm()) * st;
        assert!(st * st <= sd * (1.0 + 1e-10) && sd <= upper * (1.0 + 1e-10), "{st} {sd}");
    }
}
