use rand::Rng;
use serde::{Deserialize, Serialize};

use super::membership::{MembershipOracle, MembershipVerdict};
use super::report::{probe_spheres, SpectrumReport};
use super::{SpectralError, BALL_SLACK};
use crate::qmat::{random_vector, right_scale, vec_norm, vec_sub, QMatrix};
use crate::quat::{sample_sphere_with, seeded_rng, Quaternion, SimilaritySphere, UnitQuaternion};

/// `x lambda - T x`, evaluated with quaternion arithmetic rather than an embedding.
fn apply_t_lambda(t: &QMatrix, lambda: Quaternion, x: &[Quaternion]) -> Result<Vec<Quaternion>, SpectralError> {
    Ok(vec_sub(&right_scale(x, lambda), &t.matvec(x)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationCheck {
    pub trials: usize,
    pub max_residual: f64,
}

/// Largest of `||Delta x - T_lambda T_{lambda*} x||` and `||Delta x - T_{lambda*} T_lambda x||`
/// over random `x`, relative to `||Delta|| ||x||`.
pub fn verify_factorization<R: Rng + ?Sized>(
    t: &QMatrix,
    lambda: Quaternion,
    trials: usize,
    rng: &mut R,
) -> Result<FactorizationCheck, SpectralError> {
    assert!(trials >= 1, "at least one trial");
    let delta = t.build_delta(lambda);
    let delta_norm = delta.norm()?;
    let lc = lambda.conj();
    let mut max_residual: f64 = 0.0;
    for _ in 0..trials {
        let x = random_vector(t.n(), rng);
        let dx = delta.matvec(&x)?;
        let a = apply_t_lambda(t, lambda, &apply_t_lambda(t, lc, &x)?)?;
        let b = apply_t_lambda(t, lc, &apply_t_lambda(t, lambda, &x)?)?;
        let denom = delta_norm * vec_norm(&x) + 1e-300;
        let r = vec_norm(&vec_sub(&dx, &a)).max(vec_norm(&vec_sub(&dx, &b))) / denom;
        max_residual = max_residual.max(r);
    }
    Ok(FactorizationCheck {
        trials,
        max_residual,
    })
}

/// `||(T_lambda x) q - T_mu (x q)|| / (||x|| (|lambda| + ||T||))` with `mu = q* lambda q`.
pub fn verify_slide_identity(
    t: &QMatrix,
    x: &[Quaternion],
    lambda: Quaternion,
    q: UnitQuaternion,
) -> Result<f64, SpectralError> {
    let qv = q.get();
    let mu = lambda.conjugate_by(q);
    let lhs = right_scale(&apply_t_lambda(t, lambda, x)?, qv);
    let rhs = apply_t_lambda(t, mu, &right_scale(x, qv))?;
    let denom = vec_norm(x) * (lambda.norm() + t.norm()?) + 1e-300;
    Ok(vec_norm(&vec_sub(&lhs, &rhs)) / denom)
}

/// Relative gap between `sigma_min(T_lambda)` and `sigma_min(T_{s lambda s*})`.
pub fn conjugation_symmetry(
    t: &QMatrix,
    lambda: Quaternion,
    s: UnitQuaternion,
) -> Result<f64, SpectralError> {
    let oracle = MembershipOracle::new(t, super::DEFAULT_TOL)?;
    let moved = s.get() * lambda * s.get().conj();
    let a = oracle.sigma_min_t_lambda(lambda)?;
    let b = oracle.sigma_min_t_lambda(moved)?;
    Ok((a - b).abs() / a.max(b).max(f64::MIN_POSITIVE))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircularityCheck {
    pub passed: bool,
    pub checked: usize,
    pub controls_checked: usize,
    /// Sphere samples that were not members.
    pub failures: Vec<MembershipVerdict>,
    /// Off-sphere controls that were not clearly outside.
    pub control_failures: Vec<MembershipVerdict>,
}

/// Every sampled point of every sphere must be a member; sampled points of
/// off-sphere control spheres must not be.
pub fn verify_circularity(
    t: &QMatrix,
    report: &SpectrumReport,
    samples_per_sphere: usize,
    seed: u64,
) -> Result<CircularityCheck, SpectralError> {
    let oracle = MembershipOracle::new(t, report.tolerances.relative)?;
    let mut rng = seeded_rng(seed);
    let mut failures = Vec::new();
    let mut checked = 0;
    for entry in &report.spheres {
        for _ in 0..samples_per_sphere {
            let v = oracle.verdict(sample_sphere_with(entry.sphere(), &mut rng))?;
            checked += 1;
            if !v.in_right_spectrum {
                failures.push(v);
            }
        }
    }
    let mut control_failures = Vec::new();
    let mut controls_checked = 0;
    for sph in probe_spheres(report, 3) {
        for _ in 0..samples_per_sphere {
            let v = oracle.verdict(sample_sphere_with(sph, &mut rng))?;
            controls_checked += 1;
            if !v.clearly_outside() {
                control_failures.push(v);
            }
        }
    }
    Ok(CircularityCheck {
        passed: failures.is_empty() && control_failures.is_empty(),
        checked,
        controls_checked,
        failures,
        control_failures,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallCheck {
    pub passed: bool,
    pub norm: f64,
    pub bound: f64,
    pub max_modulus: f64,
    pub violations: Vec<SimilaritySphere>,
}

/// Every sphere lies in the closed ball of radius `||T||`, up to `1e-8 max(1, ||T||)`.
pub fn verify_ball_containment(t: &QMatrix, report: &SpectrumReport) -> Result<BallCheck, SpectralError> {
    let norm = t.norm()?;
    let bound = norm + BALL_SLACK * norm.max(1.0);
    let spheres = report.sphere_list();
    let max_modulus = spheres.iter().map(|s| s.modulus()).fold(0.0, f64::max);
    let violations: Vec<SimilaritySphere> = spheres.into_iter().filter(|s| s.modulus() > bound).collect();
    Ok(BallCheck {
        passed: violations.is_empty(),
        norm,
        bound,
        max_modulus,
        violations,
    })
}
