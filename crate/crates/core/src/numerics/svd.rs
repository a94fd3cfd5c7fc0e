//! Extreme singular values.
//!
//! Two independent paths:
//!
//! * Householder bidiagonalization followed by bisection on the Golub-Kahan
//!   tridiagonal. Backward stable, so every singular value is accurate to about
//!   `eps * sigma_max`.
//! * For `sigma_min`, inverse iteration on `(M^H M)^{-1}` through an LU factor.
//!   When it converges this keeps relative accuracy on structured, nearly
//!   singular matrices (finite sections of shifts reach `1e-77`), where the
//!   normwise path only returns rounding noise. If it stalls on clustered
//!   values the bidiagonal path answers instead.

use serde::{Deserialize, Serialize};

use super::lu::Lu;
use super::matrix::{vec_norm, Mat, Scalar};
use super::{check_square, NumericsError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularKind {
    Smallest,
    Largest,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularEstimate {
    pub value: f64,
    pub kind: SingularKind,
    pub converged: bool,
}

const INVERSE_ITERATION_CAP: usize = 300;
const INVERSE_ITERATION_RTOL: f64 = 1e-13;
const BISECTION_CAP: usize = 4000;

/// Smallest singular value of a square matrix.
pub fn sigma_min<S: Scalar>(m: &Mat<S>) -> Result<SingularEstimate, NumericsError> {
    sigma_min_with_vector(m).map(|(est, _)| est)
}

/// Smallest singular value plus an approximate right singular vector.
pub fn sigma_min_with_vector<S: Scalar>(
    m: &Mat<S>,
) -> Result<(SingularEstimate, Vec<S>), NumericsError> {
    let n = check_square(m)?;
    let estimate = |value, converged| SingularEstimate {
        value,
        kind: SingularKind::Smallest,
        converged,
    };
    let lu = Lu::new(m)?;
    if let Some(x) = lu.kernel_vector() {
        return Ok((estimate(0.0, true), x));
    }
    match inverse_iteration(&lu, n) {
        InverseIteration::Converged { value, vector } => Ok((estimate(value, true), vector)),
        InverseIteration::Underflow { vector } => Ok((estimate(0.0, true), vector)),
        InverseIteration::Stalled { vector } => {
            let values = singular_values(m)?;
            let value = *values.last().expect("non-empty");
            Ok((estimate(value, true), vector))
        }
    }
}

/// Largest singular value (spectral norm).
pub fn sigma_max<S: Scalar>(m: &Mat<S>) -> Result<SingularEstimate, NumericsError> {
    check_square(m)?;
    let (d, e) = bidiagonalize(m);
    let value = kth_smallest(&d, &e, d.len());
    Ok(SingularEstimate {
        value,
        kind: SingularKind::Largest,
        converged: true,
    })
}

/// All singular values in descending order.
pub fn singular_values<S: Scalar>(m: &Mat<S>) -> Result<Vec<f64>, NumericsError> {
    check_square(m)?;
    let (d, e) = bidiagonalize(m);
    Ok(bidiagonal_singular_values(&d, &e))
}

/// Singular values (descending) of the upper bidiagonal matrix with diagonal `d`
/// and superdiagonal `e`. Entries may have any sign.
pub fn bidiagonal_singular_values(d: &[f64], e: &[f64]) -> Vec<f64> {
    assert_eq!(e.len() + 1, d.len().max(1));
    let d: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let e: Vec<f64> = e.iter().map(|v| v.abs()).collect();
    (1..=d.len()).rev().map(|k| kth_smallest(&d, &e, k)).collect()
}

enum InverseIteration<S> {
    Converged { value: f64, vector: Vec<S> },
    Underflow { vector: Vec<S> },
    Stalled { vector: Vec<S> },
}

fn start_vector<S: Scalar>(n: usize) -> Vec<S> {
    // Weyl sequence: deterministic and not orthogonal to any sparse singular vector.
    let golden = 0.618_033_988_749_894_9;
    let x: Vec<S> = (0..n)
        .map(|i| S::from_real(0.5 + ((i as f64 + 1.0) * golden).fract()))
        .collect();
    let nrm = vec_norm(&x);
    x.into_iter().map(|v| v.scale(1.0 / nrm)).collect()
}

fn inverse_iteration<S: Scalar>(lu: &Lu<S>, n: usize) -> InverseIteration<S> {
    let mut x = start_vector::<S>(n);
    let mut prev = f64::NAN;
    let mut prev_change = f64::INFINITY;
    for it in 0..INVERSE_ITERATION_CAP {
        let mut y = x.clone();
        lu.solve_adjoint_in_place(&mut y);
        let ny = vec_norm(&y);
        if !ny.is_finite() {
            return InverseIteration::Underflow { vector: x };
        }
        y.iter_mut().for_each(|v| *v = v.scale(1.0 / ny));
        let mut z = y;
        lu.solve_in_place(&mut z);
        let nz = vec_norm(&z);
        if !nz.is_finite() {
            return InverseIteration::Underflow { vector: x };
        }
        z.iter_mut().for_each(|v| *v = v.scale(1.0 / nz));
        x = z;
        // ||(M^H M)^{-1} x|| -> 1 / sigma_min^2
        let value = 1.0 / (ny.sqrt() * nz.sqrt());
        if it > 0 {
            let change = (value - prev).abs() / value.max(f64::MIN_POSITIVE);
            // require linear convergence with ratio <= 1/2 so the remaining error
            // is bounded by the last step
            if change <= INVERSE_ITERATION_RTOL && (change == 0.0 || change <= 0.5 * prev_change)
            {
                return InverseIteration::Converged { value, vector: x };
            }
            prev_change = change;
        }
        prev = value;
    }
    InverseIteration::Stalled { vector: x }
}

/// Householder reduction to upper bidiagonal form; returns the moduli of the
/// diagonal and superdiagonal, which share the singular values of `m`.
fn bidiagonalize<S: Scalar>(m: &Mat<S>) -> (Vec<f64>, Vec<f64>) {
    let n = m.rows();
    let mut a = m.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![S::zero(); n];
    let mut w = vec![S::zero(); n];

    for k in 0..n {
        // left reflector on column k, rows k..n
        let len = n - k;
        for i in 0..len {
            v[i] = a[(k + i, k)];
        }
        if let Some(beta) = householder(&mut v[..len]) {
            // a[k.., k..] -= v (2/|v|^2) (v^H a[k.., k..]) ; v already scaled so factor is 1
            w[..len].iter_mut().for_each(|x| *x = S::zero());
            for i in 0..len {
                let vi = v[i].conj();
                if vi == S::zero() {
                    continue;
                }
                let row = &a.row(k + i)[k..];
                for (wj, &aij) in w[..len].iter_mut().zip(row) {
                    *wj += vi * aij;
                }
            }
            for i in 0..len {
                let vi = v[i];
                if vi == S::zero() {
                    continue;
                }
                let row = &mut a.row_mut(k + i)[k..];
                for (aij, &wj) in row.iter_mut().zip(&w[..len]) {
                    *aij -= vi * wj;
                }
            }
            d[k] = beta;
        } else {
            d[k] = a[(k, k)].modulus();
        }

        if k + 1 >= n {
            break;
        }
        // right reflector on row k, columns k+1..n
        let len = n - k - 1;
        for j in 0..len {
            v[j] = a[(k, k + 1 + j)].conj();
        }
        if let Some(beta) = householder(&mut v[..len]) {
            // rows i >= k: a[i, k+1..] -= (a[i, k+1..] . v) v^H
            for i in k..n {
                let row = &mut a.row_mut(i)[k + 1..];
                let mut dot = S::zero();
                for (&aij, &vj) in row.iter().zip(&v[..len]) {
                    dot += aij * vj;
                }
                if dot == S::zero() {
                    continue;
                }
                for (aij, &vj) in row.iter_mut().zip(&v[..len]) {
                    *aij -= dot * vj.conj();
                }
            }
            e[k] = beta;
        } else {
            e[k] = a[(k, k + 1)].modulus();
        }
    }
    (d, e)
}

/// Overwrites `x` with a reflector vector `v` such that `(I - v v^H) x = beta e1`
/// with `|beta| = ||x||`, and returns `|beta|`. `None` when `x` is already a
/// multiple of `e1` (nothing to annihilate).
fn householder<S: Scalar>(x: &mut [S]) -> Option<f64> {
    if x.len() <= 1 {
        return None;
    }
    let tail = vec_norm(&x[1..]);
    if tail == 0.0 {
        return None;
    }
    let norm = vec_norm(x);
    let alpha = x[0];
    let amod = alpha.modulus();
    let phase = if amod == 0.0 {
        S::one()
    } else {
        alpha.scale(1.0 / amod)
    };
    // beta = -phase * norm; v = x - beta e1; normalize so that v^H v = 2
    x[0] = alpha + phase.scale(norm);
    let vnorm = vec_norm(x);
    let s = 2f64.sqrt() / vnorm;
    x.iter_mut().for_each(|c| *c = c.scale(s));
    Some(norm)
}

/// Number of singular values of the bidiagonal (nonnegative `d`, `e`) strictly
/// below `x`, by a Sturm count on the zero-diagonal Golub-Kahan tridiagonal.
fn count_below(d: &[f64], e: &[f64], x: f64, pivmin: f64) -> usize {
    let n = d.len();
    let mut neg: usize = 0;
    let mut q = -x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        neg += 1;
    }
    for k in 0..2 * n - 1 {
        let b = if k % 2 == 0 { d[k / 2] } else { e[k / 2] };
        q = -x - b * b / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            neg += 1;
        }
    }
    // eigenvalues of the 2n tridiagonal are +-sigma; the n negative ones are all below x > 0
    neg.saturating_sub(n)
}

/// k-th smallest singular value (1-based) by bisection.
fn kth_smallest(d: &[f64], e: &[f64], k: usize) -> f64 {
    let n = d.len();
    debug_assert!(k >= 1 && k <= n);
    let bmax = d.iter().chain(e).fold(0.0f64, |m, v| m.max(v.abs()));
    if bmax == 0.0 {
        return 0.0;
    }
    // Gershgorin bound on the tridiagonal
    let mut hi = 0.0f64;
    for i in 0..2 * n {
        let left = if i > 0 { bterm(d, e, i - 1) } else { 0.0 };
        let right = if i < 2 * n - 1 { bterm(d, e, i) } else { 0.0 };
        hi = hi.max(left + right);
    }
    hi *= 1.0 + 4.0 * f64::EPSILON;
    let pivmin = f64::MIN_POSITIVE * bmax.max(1.0);
    let mut lo = 0.0f64;
    for _ in 0..BISECTION_CAP {
        let mid = if lo > 0.0 && hi / lo > 4.0 {
            // geometric steps find tiny values quickly
            (lo * hi).sqrt()
        } else if lo == 0.0 && hi > 1e-300 * bmax.max(1.0) {
            hi / 16.0
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(d, e, mid, pivmin) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn bterm(d: &[f64], e: &[f64], k: usize) -> f64 {
    if k % 2 == 0 {
        d[k / 2]
    } else {
        e[k / 2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn identity_and_diagonal() {
        for n in [1, 3, 8] {
            let id = Mat::<f64>::identity(n);
            assert!((sigma_min(&id).unwrap().value - 1.0).abs() < 1e-14);
            assert!((sigma_max(&id).unwrap().value - 1.0).abs() < 1e-14);
        }
        let d = Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, 3.0]]);
        assert!((sigma_min(&d).unwrap().value - 1.0).abs() < 1e-14);
        assert!((sigma_max(&d).unwrap().value - 3.0).abs() < 1e-14);
    }

    #[test]
    fn zero_row_gives_zero() {
        let m = Mat::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![0.0, 0.0, 0.0],
            vec![4.0, -1.0, 2.0],
        ]);
        let s = sigma_min(&m).unwrap();
        assert!(s.value <= 1e-12);
        assert!(s.converged);
    }

    #[test]
    fn nilpotent_norm() {
        let m = Mat::from_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]);
        assert!((sigma_max(&m).unwrap().value - 2.0).abs() < 1e-14);
        assert_eq!(sigma_min(&m).unwrap().value, 0.0);
    }

    #[test]
    fn bidiagonal_values_of_two_by_two() {
        // [[3, 4], [0, 0]] has singular values 5 and 0
        let s = bidiagonal_singular_values(&[3.0, 0.0], &[4.0]);
        assert!((s[0] - 5.0).abs() < 1e-14);
        assert!(s[1].abs() < 1e-300);
    }

    #[test]
    fn complex_unitary_has_unit_singular_values() {
        let c = |re, im| Complex64::new(re, im);
        let h = 0.5f64.sqrt();
        let u = Mat::from_rows(&[vec![c(h, 0.0), c(0.0, h)], vec![c(0.0, h), c(h, 0.0)]]);
        let s = singular_values(&u).unwrap();
        assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-14), "{s:?}");
    }

    #[test]
    fn rejects_non_square() {
        let m = Mat::<f64>::zeros(2, 3);
        assert!(matches!(
            sigma_min(&m),
            Err(NumericsError::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn returned_vector_is_a_near_null_vector() {
        let m = Mat::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0 + 1e-9]]);
        let (est, v) = sigma_min_with_vector(&m).unwrap();
        let r = vec_norm(&m.matvec(&v));
        // the residual itself is only computable to about eps * ||M||
        assert!((r - est.value).abs() <= 1e-14, "{r} vs {}", est.value);
        // symmetric positive definite: smallest eigenvalue det / larger, stably
        let h = 1e-9f64;
        let exact = 2.0 * h / (2.0 + h + (4.0 + h * h).sqrt());
        assert!((est.value - exact).abs() <= 1e-6 * exact, "{} vs {exact}", est.value);
    }
}
