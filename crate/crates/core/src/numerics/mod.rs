//! Dense real/complex kernels: LU, extreme singular values, eigenvalues.
//!
//! Everything here is written for small to moderate dense matrices (a few
//! hundred rows, up to ~1000 for finite sections). Matrices are row-major.

mod eig;
mod lu;
mod matrix;
mod svd;

pub use eig::{eig_dense, pair_conjugates, EigenResult, EIG_TOL};
pub use lu::Lu;
pub use matrix::{Mat, Scalar};
pub use svd::{
    bidiagonal_singular_values, sigma_max, sigma_min, sigma_min_with_vector, singular_values,
    SingularEstimate, SingularKind,
};

pub use num_complex::Complex64;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("QR iteration did not converge after {iterations} iterations ({} eigenvalues found)", found.len())]
    NoConvergence {
        iterations: usize,
        found: Vec<Complex64>,
    },
    #[error("eigenvalue {value} has no conjugate partner within tolerance")]
    UnpairedEigenvalue { value: Complex64 },
}

pub(crate) fn check_square<S: Scalar>(m: &Mat<S>) -> Result<usize, NumericsError> {
    if m.rows() != m.cols() || m.rows() == 0 {
        return Err(NumericsError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    Ok(m.rows())
}
