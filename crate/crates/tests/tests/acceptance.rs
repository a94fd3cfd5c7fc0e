//! One line per acceptance criterion; exits non-zero if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use qspectra::gallery::{eigenwitness_backward_shift, materialize, trend, OperatorSpec};
use qspectra::numerics::sigma_max;
use qspectra::qmat::{random_vector, right_scale, vec_norm, vec_sub};
use qspectra::quat::{seeded_rng, Quaternion, UnitQuaternion};
use qspectra::spectral::{
    classify_parts_finite, conjugation_symmetry, right_spectrum, verify_ball_containment,
    verify_circularity, verify_factorization, verify_slide_identity, Part, SpectralConfig,
    SpectralError,
};
use qspectra::{QMatrix, SpectrumReport};
use qspectra_cli::{run, Command as Cmd, RunConfig, EXIT_PASS};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

struct Instance {
    t: QMatrix,
    report: SpectrumReport,
    seed: u64,
}

/// Criterion 1: 50 random matrices, seeds 1..=50, n cycling through 1..=8.
fn criterion_1(instances: &mut Vec<Instance>) -> Outcome {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut confirmations = 0;
    let mut probes = 0;
    for seed in 1..=50u64 {
        let n = ((seed - 1) % 8 + 1) as usize;
        let t = QMatrix::random(n, &mut seeded_rng(seed));
        let config = SpectralConfig {
            seed,
            ..SpectralConfig::default()
        };
        match right_spectrum(&t, &config) {
            Ok(report) => {
                confirmations += report.diagnostics.confirmations.len();
                probes += report.diagnostics.probes.len();
                if report.diagnostics.probes.len() < 3
                    || report.diagnostics.confirmations.len() != 3 * report.spheres.len()
                {
                    mismatches.push(format!("seed {seed}: too few samples"));
                }
                instances.push(Instance { t, report, seed });
            }
            Err(e @ SpectralError::SpectrumMismatch { .. }) => mismatches.push(format!("seed {seed}: {e}")),
            Err(e) => mismatches.push(format!("seed {seed}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches.is_empty() && elapsed <= Duration::from_secs(60),
        format!(
            "route equivalence: 50 instances, {confirmations} sphere samples confirmed, {probes} probes rejected, \
             {} mismatches, {:.2}s (limit 60s){}",
            mismatches.len(),
            elapsed.as_secs_f64(),
            mismatches.first().map(|m| format!("; first: {m}")).unwrap_or_default()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = seeded_rng(2002);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let t = QMatrix::random(1 + k % 6, &mut rng);
        let lambda = Quaternion::random_normal(&mut rng);
        worst = worst.max(verify_factorization(&t, lambda, 1, &mut rng).unwrap().max_residual);
    }
    outcome(worst <= 1e-10, format!("factorization: 1000 triples, max relative residual {worst:.3e} (bound 1e-10)"))
}

fn criterion_3() -> Outcome {
    let mut rng = seeded_rng(3003);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let n = 1 + k % 6;
        let t = QMatrix::random(n, &mut rng);
        let x = random_vector(n, &mut rng);
        let lambda = Quaternion::random_normal(&mut rng);
        let q = UnitQuaternion::random(&mut rng);
        worst = worst.max(verify_slide_identity(&t, &x, lambda, q).unwrap());
    }
    outcome(worst <= 1e-12, format!("slide identity: 1000 quadruples, max relative residual {worst:.3e} (bound 1e-12)"))
}

fn criterion_4(instances: &[Instance]) -> Outcome {
    let mut checked = 0;
    let mut failures = 0;
    let mut control_failures = 0;
    for inst in instances {
        let c = verify_circularity(&inst.t, &inst.report, 10, inst.seed).unwrap();
        checked += c.checked;
        failures += c.failures.len();
        control_failures += c.control_failures.len();
    }
    let mut rng = seeded_rng(4004);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let t = QMatrix::random(1 + k % 6, &mut rng);
        let lambda = Quaternion::random_normal(&mut rng);
        let s = UnitQuaternion::random(&mut rng);
        worst = worst.max(conjugation_symmetry(&t, lambda, s).unwrap());
    }
    outcome(
        failures == 0 && control_failures == 0 && !instances.is_empty() && worst <= 1e-8,
        format!(
            "circularity: {checked} sphere samples, {failures} non-members, {control_failures} control failures; \
             200 conjugations, max relative sigma_min gap {worst:.3e} (bound 1e-8)"
        ),
    )
}

fn criterion_5(instances: &[Instance]) -> Outcome {
    let mut worst_excess = f64::NEG_INFINITY;
    let mut violations = 0;
    for inst in instances {
        let c = verify_ball_containment(&inst.t, &inst.report).unwrap();
        violations += c.violations.len();
        worst_excess = worst_excess.max(c.max_modulus - c.norm);
    }
    outcome(
        violations == 0 && !instances.is_empty(),
        format!("ball containment: {violations} violations, max(|sphere| - ||T||) = {worst_excess:.3e}"),
    )
}

fn criterion_6(instances: &[Instance]) -> Outcome {
    let mut total = 0;
    let mut points = 0;
    for inst in instances {
        let r = classify_parts_finite(&inst.t, inst.report.clone()).unwrap();
        total += r.spheres.len();
        points += r.spheres.iter().filter(|s| s.part == Part::Point).count();
    }
    outcome(
        total > 0 && points == total,
        format!("finite partition: {points}/{total} spheres tagged point"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = seeded_rng(7007);
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for _ in 0..20 {
        let n = rng.random_range(1..=8);
        let t = QMatrix::random_hermitian(n, &mut rng);
        match right_spectrum(&t, &SpectralConfig::default()) {
            Ok(r) => {
                for s in &r.spheres {
                    worst = worst.max(s.im_radius / r.tolerances.scale);
                }
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    outcome(
        errors.is_empty() && worst <= 1e-7,
        format!(
            "hermitian: 20 matrices, max im_radius/scale {worst:.3e} (bound 1e-7), {} route errors",
            errors.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let spec = OperatorSpec::right_shift(2);
    let sizes = [64, 128, 256];

    let half = Quaternion::new(0.0, 1.0, 1.0, 1.0) * (0.5 / 3f64.sqrt());
    let inside = trend(&spec, half, &sizes).unwrap();
    let v = &inside.sigma_min_values;
    let decay = v[0] / v[2];
    let decay_ok = v[2] <= v[0] / 10.0;

    // sigma-accuracy: the 1e-10 sigma_max relative contract of the singular value kernel
    let two = Quaternion::new(0.0, 0.0, 2.0, 0.0);
    let outside = trend(&spec, two, &sizes).unwrap();
    let floor = two.norm() - 1.0;
    let mut floor_ok = true;
    let mut window_ok = true;
    let mut worst_above: f64 = 0.0;
    for (&n, &s) in sizes.iter().zip(&outside.sigma_min_values) {
        let t = materialize(&spec.with_truncation(n)).unwrap();
        let accuracy = 1e-10 * sigma_max(t.build_t_lambda(two).matrix()).unwrap().value;
        floor_ok &= s >= floor - 1e-6;
        window_ok &= s >= floor - 1e-6 && s <= floor + accuracy;
        worst_above = worst_above.max(s - floor);
    }

    let mut witness_ok = true;
    let mut witness_detail = Vec::new();
    let b = materialize(&OperatorSpec::backward_shift(40)).unwrap();
    for lambda in [Quaternion::J * 0.5, (Quaternion::I + Quaternion::J) * 0.5] {
        let x = eigenwitness_backward_shift(lambda, 40).unwrap();
        let r = vec_norm(&vec_sub(&b.matvec(&x).unwrap(), &right_scale(&x, lambda))) / vec_norm(&x);
        let bound = lambda.norm().powi(40);
        witness_ok &= r <= bound;
        witness_detail.push(format!("{r:.3e} <= {bound:.3e}"));
    }

    let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
    outcome(
        decay_ok && window_ok && witness_ok,
        format!(
            "gallery: |lambda|=1/2 decay 64->256 {decay:.3e}x ({}); |lambda|=2 values {:?}, floor {floor} \
             (lower bound {}, within [floor-1e-6, floor+sigma-accuracy] {}, max excess {worst_above:.3e}); \
             eigenwitness N=40 {} ({})",
            mark(decay_ok),
            outside.sigma_min_values,
            mark(floor_ok),
            mark(window_ok),
            witness_detail.join(", "),
            mark(witness_ok),
        ),
    )
}

/// Two full verify runs through the command runner, compared byte for byte.
fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t.json");
    let t = QMatrix::random(4, &mut seeded_rng(99));
    std::fs::write(&input, t.to_json_string()).unwrap();
    let go = |out: &Path| {
        let mut cfg = RunConfig::new(Cmd::Verify, &input);
        cfg.output = Some(out.to_path_buf());
        run(&cfg).0.code
    };
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let (ca, cb) = (go(&a), go(&b));
    let same = std::fs::read(&a).unwrap() == std::fs::read(&b).unwrap();
    outcome(
        same && ca == EXIT_PASS && cb == EXIT_PASS,
        format!("determinism: two verify runs byte-identical = {same}, exit codes {ca}/{cb}"),
    )
}

fn main() {
    let mut instances = Vec::new();
    let results = vec![
        (1, criterion_1(&mut instances)),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4(&instances)),
        (5, criterion_5(&instances)),
        (6, criterion_6(&instances)),
        (7, criterion_7()),
        (8, criterion_8()),
        (9, criterion_9()),
    ];
    let mut failed = 0;
    for (k, r) in &results {
        println!("{} criterion {k}: {}", if r.passed { "PASS" } else { "FAIL" }, r.detail);
        failed += usize::from(!r.passed);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
