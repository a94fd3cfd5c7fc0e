//! Right spectrum and S-spectrum of finite quaternionic matrices.
//!
//! Two independent routes are kept apart on purpose:
//!
//! * the S-route takes eigenvalues of the complex adjoint, pairs conjugates and
//!   collapses them to similarity spheres;
//! * the right route decides membership of a single `lambda` from the smallest
//!   singular value of the `4n x 4n` real matrix of `T_lambda`.
//!
//! [`right_spectrum`] runs the first and confirms it point by point with the second.

mod membership;
mod report;
mod scan;
mod verify;

use serde::{Deserialize, Serialize};

use crate::numerics::{NumericsError, EIG_TOL};
use crate::qmat::QMatrixError;
use crate::quat::Quaternion;

pub use membership::{right_spectrum_member, MembershipOracle, MembershipVerdict};
pub use report::{
    classify_parts_finite, right_spectrum, s_spectrum, Diagnostics, Part, Route, SphereEntry,
    SpectrumReport,
};
pub use scan::{slice_scan, ScanGrid, ScanPoint, Window, CSV_HEADER};
pub use verify::{
    conjugation_symmetry, verify_ball_containment, verify_circularity, verify_factorization,
    verify_slide_identity, BallCheck, CircularityCheck, FactorizationCheck,
};

/// Default relative membership tolerance.
pub const DEFAULT_TOL: f64 = 1e-7;
/// Relative radius for merging eigenvalue classes into one sphere.
pub const CLUSTER_RADIUS: f64 = 1e-6;
/// Relative slack for the norm ball.
pub const BALL_SLACK: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Matrix(#[from] QMatrixError),
    #[error(
        "routes disagree at lambda = {lambda}: sigma_min(T_lambda) = {sigma_min_t_lambda:e}, \
         sigma_min(Delta) = {sigma_min_delta:e}, expected {}",
        if *expected_member { "a member" } else { "a non-member" }
    )]
    SpectrumMismatch {
        lambda: Quaternion,
        sigma_min_t_lambda: f64,
        sigma_min_delta: f64,
        expected_member: bool,
    },
    #[error("eigenvalue backward error {value:e} exceeds {EIG_TOL:e}")]
    InaccurateEigenvalues { value: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid scan window: {0}")]
    InvalidWindow(String),
    #[error("scan resolution must be at least 2x2, got {0}x{1}")]
    InvalidResolution(usize, usize),
    #[error("empty matrix")]
    Empty,
}

/// Knobs shared by the spectrum routes and the verifiers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    /// Relative membership tolerance; the absolute band is `tol * max(1, ||T||)`.
    pub tol: f64,
    pub seed: u64,
    pub samples_per_sphere: usize,
    pub probes: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            seed: 42,
            samples_per_sphere: 3,
            probes: 3,
        }
    }
}

/// Absolute thresholds derived from the relative tolerance and `||T||`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub relative: f64,
    pub scale: f64,
    /// `sigma_min(T_lambda)` at or below this is a member.
    pub membership: f64,
    /// Between `membership` and this, the verdict is indeterminate.
    pub indeterminate: f64,
    pub cluster_radius: f64,
    pub eigen_backward: f64,
}

impl Tolerances {
    pub fn new(relative: f64, norm: f64) -> Result<Self, SpectralError> {
        if !(relative > 0.0 && relative.is_finite()) {
            return Err(SpectralError::InvalidTolerance(relative));
        }
        let scale = norm.max(1.0);
        Ok(Self {
            relative,
            scale,
            membership: relative * scale,
            indeterminate: 10.0 * relative * scale,
            cluster_radius: CLUSTER_RADIUS * scale,
            eigen_backward: EIG_TOL,
        })
    }

    /// Threshold for `sigma_min(Delta_lambda)`.
    ///
    /// `Delta_lambda = T_lambda T_{lambda*}` gives
    /// `sigma_min(T_lambda)^2 <= sigma_min(Delta) <= (||T|| + |lambda|) sigma_min(T_lambda)`,
    /// so a right-spectrum member at the membership threshold has `Delta` below this.
    pub fn delta_threshold(&self, lambda: Quaternion) -> f64 {
        self.membership * (self.scale + lambda.norm()).max(1.0)
    }
}
