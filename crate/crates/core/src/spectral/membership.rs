use serde::{Deserialize, Serialize};

use super::{SpectralError, Tolerances};
use crate::numerics;
use crate::qmat::QMatrix;
use crate::quat::Quaternion;

/// Both invertibility tests at one `lambda`, with the numbers they came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub lambda: Quaternion,
    pub in_right_spectrum: bool,
    pub in_s_spectrum: bool,
    /// `sigma_min(T_lambda)` fell in the band above the tolerance.
    pub indeterminate: bool,
    pub sigma_min_t_lambda: f64,
    pub sigma_min_delta: f64,
    pub tolerance: f64,
    pub indeterminate_bound: f64,
    pub delta_threshold: f64,
}

impl MembershipVerdict {
    fn from_values(lambda: Quaternion, s_t: f64, s_d: f64, tol: &Tolerances) -> Self {
        let delta_threshold = tol.delta_threshold(lambda);
        Self {
            lambda,
            in_right_spectrum: s_t <= tol.membership,
            in_s_spectrum: s_d <= delta_threshold,
            indeterminate: s_t > tol.membership && s_t <= tol.indeterminate,
            sigma_min_t_lambda: s_t,
            sigma_min_delta: s_d,
            tolerance: tol.membership,
            indeterminate_bound: tol.indeterminate,
            delta_threshold,
        }
    }

    /// The flags agree with the stored values and thresholds.
    pub fn is_consistent(&self) -> bool {
        let t = self.sigma_min_t_lambda;
        self.in_right_spectrum == (t <= self.tolerance)
            && self.indeterminate == (t > self.tolerance && t <= self.indeterminate_bound)
            && self.in_s_spectrum == (self.sigma_min_delta <= self.delta_threshold)
    }

    /// Clearly outside: above the indeterminate band.
    pub fn clearly_outside(&self) -> bool {
        self.sigma_min_t_lambda > self.indeterminate_bound
    }
}

/// A matrix with its norm and thresholds computed once.
#[derive(Clone, Debug)]
pub struct MembershipOracle<'a> {
    t: &'a QMatrix,
    norm: f64,
    tol: Tolerances,
}

impl<'a> MembershipOracle<'a> {
    pub fn new(t: &'a QMatrix, relative_tol: f64) -> Result<Self, SpectralError> {
        if t.n() == 0 {
            return Err(SpectralError::Empty);
        }
        let norm = t.norm()?;
        let tol = Tolerances::new(relative_tol, norm)?;
        Ok(Self { t, norm, tol })
    }

    pub fn matrix(&self) -> &QMatrix {
        self.t
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn sigma_min_t_lambda(&self, lambda: Quaternion) -> Result<f64, SpectralError> {
        Ok(self.t.build_t_lambda(lambda).sigma_min()?)
    }

    /// Decided in the real embedding, not the complex adjoint, so it shares
    /// nothing with the eigenvalue route.
    pub fn sigma_min_delta(&self, lambda: Quaternion) -> Result<f64, SpectralError> {
        let delta = self.t.build_delta(lambda).real_embed();
        Ok(numerics::sigma_min(delta.matrix())?.value)
    }

    pub fn verdict(&self, lambda: Quaternion) -> Result<MembershipVerdict, SpectralError> {
        let s_t = self.sigma_min_t_lambda(lambda)?;
        let s_d = self.sigma_min_delta(lambda)?;
        Ok(MembershipVerdict::from_values(lambda, s_t, s_d, &self.tol))
    }
}

/// Membership of `lambda` in the right spectrum and the S-spectrum.
pub fn right_spectrum_member(
    t: &QMatrix,
    lambda: Quaternion,
    relative_tol: f64,
) -> Result<MembershipVerdict, SpectralError> {
    MembershipOracle::new(t, relative_tol)?.verdict(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::DEFAULT_TOL;

    const I: Quaternion = Quaternion::I;
    const K: Quaternion = Quaternion::K;

    #[test]
    fn other_point_of_the_sphere_is_a_member() {
        let t = QMatrix::from_diagonal(&[I]);
        let v = right_spectrum_member(&t, K, DEFAULT_TOL).unwrap();
        assert!(v.in_right_spectrum && v.in_s_spectrum, "{v:?}");
        assert!(v.sigma_min_t_lambda < 1e-15);
        assert!(v.is_consistent());
    }

    #[test]
    fn twice_i_is_not_a_member() {
        // x (2i) - i x: |x| on span{1, i}, 3|x| on span{j, k}
        let t = QMatrix::from_diagonal(&[I]);
        let v = right_spectrum_member(&t, I * 2.0, DEFAULT_TOL).unwrap();
        assert!(!v.in_right_spectrum && !v.indeterminate && !v.in_s_spectrum);
        assert!((v.sigma_min_t_lambda - 1.0).abs() < 1e-14);
        // Delta = i^2 + |2i|^2 = 3
        assert!((v.sigma_min_delta - 3.0).abs() < 1e-14);
    }

    #[test]
    fn zero_is_in_the_spectrum_of_zero() {
        let v = right_spectrum_member(&QMatrix::zeros(2), Quaternion::ZERO, DEFAULT_TOL).unwrap();
        assert!(v.in_right_spectrum && v.in_s_spectrum);
        assert_eq!(v.sigma_min_t_lambda, 0.0);
    }

    #[test]
    fn band_classification() {
        let tol = Tolerances::new(1e-7, 1.0).unwrap();
        let v = MembershipVerdict::from_values(I, 5e-7, 1.0, &tol);
        assert!(v.indeterminate && !v.in_right_spectrum && !v.clearly_outside());
        let v = MembershipVerdict::from_values(I, 2e-6, 1.0, &tol);
        assert!(!v.indeterminate && v.clearly_outside());
        assert!(Tolerances::new(0.0, 1.0).is_err());
        assert!(Tolerances::new(f64::NAN, 1.0).is_err());
    }
}
