//! Runs one command end to end: read the operator, compute, write the artifact.
//!
//! JSON artifacts go through `serde_json::Value`, whose maps are ordered, so
//! keys come out sorted and floats in shortest round-trip form.

use std::fs;
use std::path::{Path, PathBuf};

use qspectra::gallery::{self, GalleryError, OperatorSpec};
use qspectra::quat::{random_unit_pure, seeded_rng, Quaternion, UnitQuaternion, GENERATOR};
use qspectra::qmat::random_vector;
use qspectra::spectral::{
    self, classify_parts_finite, conjugation_symmetry, right_spectrum, slice_scan,
    verify_ball_containment, verify_circularity, verify_factorization, verify_slide_identity,
    SpectralConfig, SpectralError, Window,
};
use qspectra::QMatrix;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

pub const FACTORIZATION_BOUND: f64 = 1e-10;
pub const SLIDE_BOUND: f64 = 1e-12;
pub const SYMMETRY_BOUND: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Spectrum,
    Scan {
        /// Defaults to the norm ball padded by 25%.
        window: Option<[f64; 4]>,
        resolution: (usize, usize),
    },
    Verify,
    Trend {
        lambda: Quaternion,
        sizes: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    /// `None` writes to stdout.
    pub output: Option<PathBuf>,
    pub tol: f64,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        Self {
            command,
            input: input.into(),
            output: None,
            tol: spectral::DEFAULT_TOL,
            seed: 42,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Gallery(#[from] GalleryError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Read { .. } | Self::Input { .. } => EXIT_INPUT,
            Self::Spectral(SpectralError::SpectrumMismatch { .. }) => EXIT_FAIL,
            Self::Spectral(
                SpectralError::InvalidWindow(_)
                | SpectralError::InvalidResolution(..)
                | SpectralError::InvalidTolerance(_)
                | SpectralError::Empty,
            ) => EXIT_INPUT,
            Self::Gallery(
                GalleryError::Truncation(..)
                | GalleryError::TooLarge { .. }
                | GalleryError::MissingParams(..)
                | GalleryError::Unbounded(_)
                | GalleryError::Sizes(_)
                | GalleryError::Json(_),
            ) => EXIT_INPUT,
            _ => EXIT_FAIL,
        }
    }
}

/// What a run produced: the artifact text and the exit status it implies.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub artifact: String,
}

/// Runs the command and writes the artifact. A spectrum mismatch writes its
/// witness instead; other errors write nothing.
pub fn run(config: &RunConfig) -> (Outcome, Option<CliError>) {
    let (outcome, err) = match execute(config) {
        Ok(o) => (o, None),
        Err(e) => {
            let artifact = mismatch_artifact(&e).unwrap_or_default();
            (
                Outcome {
                    code: e.exit_code(),
                    artifact,
                },
                Some(e),
            )
        }
    };
    if outcome.artifact.is_empty() {
        return (outcome, err);
    }
    if let Err(e) = emit(config.output.as_deref(), &outcome.artifact) {
        return (
            Outcome {
                code: EXIT_INPUT,
                artifact: outcome.artifact,
            },
            Some(e),
        );
    }
    (outcome, err)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Computes the artifact without writing it.
pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(&config.input).map_err(|source| CliError::Read {
        path: config.input.clone(),
        source,
    })?;
    let spec = parse_operator(&config.input, &text)?;
    let spectral_config = SpectralConfig {
        tol: config.tol,
        seed: config.seed,
        ..SpectralConfig::default()
    };
    match &config.command {
        Command::Spectrum => {
            let t = gallery::materialize(&spec)?;
            let report = classify_parts_finite(&t, right_spectrum(&t, &spectral_config)?)?;
            Ok(Outcome {
                code: EXIT_PASS,
                artifact: to_sorted_json(&report),
            })
        }
        Command::Scan { window, resolution } => {
            let t = gallery::materialize(&spec)?;
            let window = match window {
                Some([x0, x1, y0, y1]) => Window::new(*x0, *x1, *y0, *y1)?,
                None => {
                    let r = 1.25 * t.norm().map_err(SpectralError::from)?.max(1.0);
                    Window::new(-r, r, 0.0, r)?
                }
            };
            let grid = slice_scan(&t, window, resolution.0, resolution.1)?;
            if grid.window_exceeds_padded_ball {
                eprintln!("note: scan window reaches outside the norm ball padded by 25%");
            }
            Ok(Outcome {
                code: EXIT_PASS,
                artifact: grid.to_csv(),
            })
        }
        Command::Verify => {
            let t = gallery::materialize(&spec)?;
            let summary = verify_all(&t, &spectral_config)?;
            Ok(Outcome {
                code: if summary.passed { EXIT_PASS } else { EXIT_FAIL },
                artifact: to_sorted_json(&summary),
            })
        }
        Command::Trend { lambda, sizes } => {
            let report = gallery::trend(&spec, *lambda, sizes)?;
            Ok(Outcome {
                code: EXIT_PASS,
                artifact: to_sorted_json(&report),
            })
        }
    }
}

/// A bare matrix file or an operator spec (recognized by its `kind` key).
fn parse_operator(path: &Path, text: &str) -> Result<OperatorSpec, CliError> {
    let input_err = |message: String| CliError::Input {
        path: path.to_path_buf(),
        message,
    };
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| input_err(format!("malformed JSON: {e}")))?;
    if value.get("kind").is_some() {
        OperatorSpec::from_json_str(text).map_err(|e| input_err(e.to_string()))
    } else {
        QMatrix::from_json_str(text)
            .map(OperatorSpec::finite)
            .map_err(|e| input_err(e.to_string()))
    }
}

pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("artifact is serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("value is serializable");
    s.push('\n');
    s
}

fn mismatch_artifact(e: &CliError) -> Option<String> {
    match e {
        CliError::Spectral(SpectralError::SpectrumMismatch {
            lambda,
            sigma_min_t_lambda,
            sigma_min_delta,
            expected_member,
        }) => Some(to_sorted_json(&json!({
            "error": "spectrum_mismatch",
            "message": e.to_string(),
            "witness": {
                "lambda": lambda,
                "sigma_min_T_lambda": sigma_min_t_lambda,
                "sigma_min_Delta": sigma_min_delta,
                "expected_member": expected_member,
            }
        }))),
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualCheck {
    pub trials: usize,
    pub max_residual: f64,
    pub bound: f64,
    pub passed: bool,
}

impl ResidualCheck {
    fn new(trials: usize, max_residual: f64, bound: f64) -> Self {
        Self {
            trials,
            max_residual,
            bound,
            passed: max_residual <= bound,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub passed: bool,
    pub seed: u64,
    pub generator: String,
    pub n: usize,
    pub spheres: Vec<qspectra::SimilaritySphere>,
    pub factorization: ResidualCheck,
    pub slide_identity: ResidualCheck,
    pub conjugation_symmetry: ResidualCheck,
    pub circularity: spectral::CircularityCheck,
    pub ball_containment: spectral::BallCheck,
}

const VERIFY_LAMBDAS: usize = 10;
const VECTORS_PER_LAMBDA: usize = 10;
const SLIDE_TRIALS: usize = 100;
const SYMMETRY_TRIALS: usize = 20;
const CIRCULARITY_SAMPLES: usize = 10;

/// Factorization, slide identity, circularity and ball containment on one matrix.
pub fn verify_all(t: &QMatrix, config: &SpectralConfig) -> Result<VerifySummary, CliError> {
    let report = right_spectrum(t, config)?;
    let mut rng = seeded_rng(config.seed);
    let scale = report.tolerances.scale;
    let n = t.n();

    let mut fact: f64 = 0.0;
    for _ in 0..VERIFY_LAMBDAS {
        let lambda = Quaternion::random_normal(&mut rng) * scale;
        let c = verify_factorization(t, lambda, VECTORS_PER_LAMBDA, &mut rng)?;
        fact = fact.max(c.max_residual);
    }

    let mut slide: f64 = 0.0;
    for _ in 0..SLIDE_TRIALS {
        let x = random_vector(n, &mut rng);
        let lambda = Quaternion::random_normal(&mut rng) * scale;
        let q = UnitQuaternion::random(&mut rng);
        slide = slide.max(verify_slide_identity(t, &x, lambda, q)?);
    }

    let mut symmetry: f64 = 0.0;
    for _ in 0..SYMMETRY_TRIALS {
        // random points at modulus between 0.5 and 1.5 times the scale, off the real axis
        let r = scale * rng.random_range(0.5..1.5);
        let lambda = Quaternion::real(rng.random_range(-r..r)) + random_unit_pure(&mut rng) * r;
        let s = UnitQuaternion::random(&mut rng);
        symmetry = symmetry.max(conjugation_symmetry(t, lambda, s)?);
    }

    let circularity = verify_circularity(t, &report, CIRCULARITY_SAMPLES, config.seed)?;
    let ball = verify_ball_containment(t, &report)?;
    let factorization = ResidualCheck::new(VERIFY_LAMBDAS * VECTORS_PER_LAMBDA, fact, FACTORIZATION_BOUND);
    let slide_identity = ResidualCheck::new(SLIDE_TRIALS, slide, SLIDE_BOUND);
    let conjugation_symmetry = ResidualCheck::new(SYMMETRY_TRIALS, symmetry, SYMMETRY_BOUND);
    Ok(VerifySummary {
        passed: factorization.passed
            && slide_identity.passed
            && conjugation_symmetry.passed
            && circularity.passed
            && ball.passed,
        seed: config.seed,
        generator: GENERATOR.to_string(),
        n,
        spheres: report.sphere_list(),
        factorization,
        slide_identity,
        conjugation_symmetry,
        circularity,
        ball_containment: ball,
    })
}
