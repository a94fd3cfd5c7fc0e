use serde::{Deserialize, Serialize};

use super::membership::{MembershipOracle, MembershipVerdict};
use super::{SpectralConfig, SpectralError, Tolerances};
use crate::numerics::{self, Complex64};
use crate::qmat::{unflatten, vec_norm, QMatrix};
use crate::quat::{sample_sphere_with, seeded_rng, Quaternion, SimilaritySphere, GENERATOR};

/// Which part of the spectrum a sphere belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Point,
    Residual,
    Continuous,
    Unclassified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    SSpectrum,
    RightSpectrum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereEntry {
    pub re: f64,
    pub im_radius: f64,
    pub multiplicity: usize,
    pub part: Part,
    /// `sigma_min` of the real embedding of `Delta_lambda` at the canonical point.
    pub sigma_min_delta: f64,
    /// Unit `x` with `T_lambda x ~ 0` at the canonical point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Quaternion>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_residual: Option<f64>,
}

impl SphereEntry {
    pub fn sphere(&self) -> SimilaritySphere {
        SimilaritySphere::new(self.re, self.im_radius)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub route: Route,
    pub eigen_backward_error: f64,
    pub max_sigma_min_delta: f64,
    pub seed: u64,
    pub generator: String,
    #[serde(default)]
    pub confirmations: Vec<MembershipVerdict>,
    #[serde(default)]
    pub probes: Vec<MembershipVerdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub spheres: Vec<SphereEntry>,
    pub norm_bound: f64,
    pub tolerances: Tolerances,
    pub diagnostics: Diagnostics,
}

impl SpectrumReport {
    pub fn sphere_list(&self) -> Vec<SimilaritySphere> {
        self.spheres.iter().map(SphereEntry::sphere).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.spheres.iter().map(|s| s.multiplicity).sum()
    }

    /// Distance from `sph` to the nearest reported sphere in the `(re, im_radius)` half-plane.
    pub fn distance_to_spectrum(&self, sph: SimilaritySphere) -> f64 {
        self.spheres
            .iter()
            .map(|s| s.sphere().distance(sph))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Spheres from the eigenvalues of the complex adjoint.
pub fn s_spectrum(t: &QMatrix, config: &SpectralConfig) -> Result<SpectrumReport, SpectralError> {
    let oracle = MembershipOracle::new(t, config.tol)?;
    let tol = *oracle.tolerances();
    let eig = numerics::eig_dense(t.complex_adjoint().matrix())?;
    if eig.backward_error > tol.eigen_backward {
        return Err(SpectralError::InaccurateEigenvalues {
            value: eig.backward_error,
        });
    }
    // Defective eigenvalues spread like eps^(1/k), so pairing uses the cluster radius.
    let pairs = numerics::pair_conjugates(&eig.values, tol.cluster_radius)?;
    let points: Vec<SimilaritySphere> = pairs.iter().map(|&(a, b)| pair_class(a, b)).collect();

    let mut spheres = Vec::new();
    let mut max_delta: f64 = 0.0;
    for (sph, multiplicity) in cluster(&points, tol.cluster_radius) {
        let sigma_min_delta = oracle.sigma_min_delta(sph.canonical())?;
        max_delta = max_delta.max(sigma_min_delta);
        spheres.push(SphereEntry {
            re: sph.re,
            im_radius: sph.im_radius,
            multiplicity,
            part: Part::Unclassified,
            sigma_min_delta,
            witness: None,
            witness_residual: None,
        });
    }
    Ok(SpectrumReport {
        n: t.n(),
        spheres,
        norm_bound: oracle.norm(),
        tolerances: tol,
        diagnostics: Diagnostics {
            route: Route::SSpectrum,
            eigen_backward_error: eig.backward_error,
            max_sigma_min_delta: max_delta,
            seed: config.seed,
            generator: GENERATOR.to_string(),
            confirmations: Vec::new(),
            probes: Vec::new(),
        },
    })
}

fn pair_class(a: Complex64, b: Complex64) -> SimilaritySphere {
    SimilaritySphere::new(0.5 * (a.re + b.re), 0.5 * (a.im.abs() + b.im.abs()))
}

/// Single-linkage clustering; returns multiplicity-weighted centres sorted by `(re, im_radius)`.
fn cluster(points: &[SimilaritySphere], radius: f64) -> Vec<(SimilaritySphere, usize)> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if points[i].distance(points[j]) <= radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, f64, f64, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 += points[i].re;
                g.2 += points[i].im_radius;
                g.3 += 1;
            }
            None => groups.push((root, points[i].re, points[i].im_radius, 1)),
        }
    }
    let mut out: Vec<(SimilaritySphere, usize)> = groups
        .into_iter()
        .map(|(_, re, im, m)| (SimilaritySphere::new(re / m as f64, im / m as f64), m))
        .collect();
    out.sort_by(|a, b| {
        a.0.re
            .total_cmp(&b.0.re)
            .then(a.0.im_radius.total_cmp(&b.0.im_radius))
    });
    out
}

/// The S-route spheres, each confirmed through `T_lambda` at sampled points, plus
/// probes away from every sphere that must be rejected.
pub fn right_spectrum(t: &QMatrix, config: &SpectralConfig) -> Result<SpectrumReport, SpectralError> {
    let mut report = s_spectrum(t, config)?;
    let oracle = MembershipOracle::new(t, config.tol)?;
    let mut rng = seeded_rng(config.seed);

    let mut confirmations = Vec::new();
    for entry in &report.spheres {
        for _ in 0..config.samples_per_sphere {
            let lambda = sample_sphere_with(entry.sphere(), &mut rng);
            let v = oracle.verdict(lambda)?;
            if !v.in_right_spectrum {
                return Err(mismatch(&v, true));
            }
            confirmations.push(v);
        }
    }

    let mut probes = Vec::new();
    for sph in probe_spheres(&report, config.probes) {
        let lambda = sample_sphere_with(sph, &mut rng);
        let v = oracle.verdict(lambda)?;
        if !v.clearly_outside() {
            return Err(mismatch(&v, false));
        }
        probes.push(v);
    }

    report.diagnostics.route = Route::RightSpectrum;
    report.diagnostics.confirmations = confirmations;
    report.diagnostics.probes = probes;
    Ok(report)
}

fn mismatch(v: &MembershipVerdict, expected_member: bool) -> SpectralError {
    SpectralError::SpectrumMismatch {
        lambda: v.lambda,
        sigma_min_t_lambda: v.sigma_min_t_lambda,
        sigma_min_delta: v.sigma_min_delta,
        expected_member,
    }
}

/// Greedy farthest points from the spheres and from each other on a grid over
/// `[-1.25R, 1.25R] x [0, 1.25R]`, `R = max(1, ||T||)`.
pub(crate) fn probe_spheres(report: &SpectrumReport, count: usize) -> Vec<SimilaritySphere> {
    const NX: usize = 41;
    const NY: usize = 21;
    let r = 1.25 * report.tolerances.scale;
    let min_distance = 10.0 * report.tolerances.relative * report.tolerances.scale;
    let candidates: Vec<SimilaritySphere> = (0..NY)
        .flat_map(|iy| {
            (0..NX).map(move |ix| {
                SimilaritySphere::new(
                    -r + 2.0 * r * ix as f64 / (NX - 1) as f64,
                    r * iy as f64 / (NY - 1) as f64,
                )
            })
        })
        .collect();
    let mut anchors = report.sphere_list();
    let mut chosen = Vec::new();
    for _ in 0..count {
        let best = candidates
            .iter()
            .filter(|c| !chosen.contains(*c))
            .map(|&c| {
                let d = anchors
                    .iter()
                    .map(|a| a.distance(c))
                    .fold(f64::INFINITY, f64::min);
                (c, d)
            })
            .filter(|&(_, d)| d >= min_distance)
            .fold(None::<(SimilaritySphere, f64)>, |best, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            });
        match best {
            Some((c, _)) => {
                chosen.push(c);
                anchors.push(c);
            }
            None => break,
        }
    }
    chosen
}

/// Tags every sphere as point spectrum and attaches an eigen-witness.
///
/// In finite dimension `T_lambda` fails to be bounded below exactly when it has
/// a kernel, and its range is always closed, so nothing else can occur.
pub fn classify_parts_finite(
    t: &QMatrix,
    mut report: SpectrumReport,
) -> Result<SpectrumReport, SpectralError> {
    for entry in &mut report.spheres {
        let op = t.build_t_lambda(entry.sphere().canonical());
        let (_, v) = numerics::sigma_min_with_vector(op.matrix())?;
        let x = unflatten(&v);
        entry.witness_residual = Some(vec_norm(&op.apply(&x)) / vec_norm(&x));
        entry.witness = Some(x);
        entry.part = Part::Point;
    }
    Ok(report)
}
