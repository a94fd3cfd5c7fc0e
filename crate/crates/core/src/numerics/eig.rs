//! Eigenvalues of dense complex matrices.
//!
//! Householder reduction to upper Hessenberg form, then single-shift QR with a
//! Wilkinson shift and exceptional shifts every tenth stalled step. Only the
//! eigenvalues are wanted, so rotations are confined to the active block.

use num_complex::Complex64;

use super::matrix::{vec_norm, Mat, Scalar};
use super::svd::{sigma_max, sigma_min};
use super::{check_square, NumericsError};

/// Residual bound each returned eigenvalue must meet, relative to `||M||`.
pub const EIG_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    pub values: Vec<Complex64>,
    /// `max_mu sigma_min(M - mu I) / ||M||`.
    pub backward_error: f64,
}

/// All eigenvalues with multiplicity. The iteration cap is `30 * dim` QR steps.
pub fn eig_dense(m: &Mat<Complex64>) -> Result<EigenResult, NumericsError> {
    let n = check_square(m)?;
    let mut h = m.clone();
    hessenberg(&mut h);
    let values = hessenberg_qr(&mut h, 30 * n.max(1))?;

    let norm = sigma_max(m)?.value;
    let mut backward_error: f64 = 0.0;
    for &mu in &values {
        let r = sigma_min(&m.shifted(mu))?.value;
        backward_error = backward_error.max(if norm > 0.0 { r / norm } else { r });
    }
    Ok(EigenResult {
        values,
        backward_error,
    })
}

fn hessenberg(a: &mut Mat<Complex64>) {
    let n = a.rows();
    let mut v = vec![Complex64::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        for i in 0..len {
            v[i] = a[(k + 1 + i, k)];
        }
        let tail = vec_norm(&v[1..len]);
        if tail == 0.0 {
            continue;
        }
        let norm = vec_norm(&v[..len]);
        let alpha = v[0];
        let phase = if alpha.norm() == 0.0 {
            Complex64::one()
        } else {
            alpha / alpha.norm()
        };
        v[0] = alpha + phase * norm;
        let s = 2f64.sqrt() / vec_norm(&v[..len]);
        v[..len].iter_mut().for_each(|c| *c *= s);

        // left: rows k+1.., all columns k..
        for j in k..n {
            let mut dot = Complex64::zero();
            for i in 0..len {
                dot += v[i].conj() * a[(k + 1 + i, j)];
            }
            if dot == Complex64::zero() {
                continue;
            }
            for i in 0..len {
                a[(k + 1 + i, j)] -= v[i] * dot;
            }
        }
        // right: all rows, columns k+1..
        for i in 0..n {
            let row = &mut a.row_mut(i)[k + 1..];
            let mut dot = Complex64::zero();
            for (x, &vj) in row.iter().zip(&v[..len]) {
                dot += *x * vj;
            }
            if dot == Complex64::zero() {
                continue;
            }
            for (x, &vj) in row.iter_mut().zip(&v[..len]) {
                *x -= dot * vj.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = Complex64::zero();
        }
    }
}

fn hessenberg_qr(h: &mut Mat<Complex64>, cap: usize) -> Result<Vec<Complex64>, NumericsError> {
    let n = h.rows();
    let mut values = vec![Complex64::zero(); n];
    let mut found: Vec<Complex64> = Vec::new();
    let mut hi = n as isize - 1;
    let mut total = 0usize;
    let mut stalled = 0usize;
    let hnorm = h.max_abs();

    while hi >= 0 {
        let hiu = hi as usize;
        // find the start of the unreduced block ending at hi
        let mut lo = hiu;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut tst = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if tst == 0.0 {
                tst = hnorm;
            }
            if sub <= f64::EPSILON * tst || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = Complex64::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hiu {
            values[hiu] = h[(hiu, hiu)];
            found.push(values[hiu]);
            hi -= 1;
            stalled = 0;
            continue;
        }

        total += 1;
        stalled += 1;
        if total > cap {
            found.reverse();
            return Err(NumericsError::NoConvergence {
                iterations: total - 1,
                found,
            });
        }

        let shift = if stalled % 10 == 0 {
            h[(hiu, hiu)] + Complex64::new(0.75 * h[(hiu, hiu - 1)].re.abs(), 0.0)
        } else {
            wilkinson_shift(
                h[(hiu - 1, hiu - 1)],
                h[(hiu - 1, hiu)],
                h[(hiu, hiu - 1)],
                h[(hiu, hiu)],
            )
        };
        qr_step(h, lo, hiu, shift);
    }
    Ok(values)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let r1 = d + half + disc;
    let r2 = d + half - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// One explicit shifted QR step on the block `lo..=hi`: `H - s I = Q R`, `H <- R Q + s I`.
fn qr_step(h: &mut Mat<Complex64>, lo: usize, hi: usize, shift: Complex64) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        h[(k + 1, k)] = Complex64::zero();
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        let top = (k + 2).min(hi);
        for i in lo..=top {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + s.conj() * y;
            h[(i, k + 1)] = -s * x + y * c;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}

/// `c` real, `s` complex with `[[c, s], [-conj(s), c]] [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::zero());
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, Complex64::one());
    }
    let rho = an.hypot(bn);
    let c = an / rho;
    let s = (a / an) * b.conj() / rho;
    (c, s)
}

/// Greedy nearest-neighbour matching of each eigenvalue with a partner close to its
/// conjugate. Tolerance is `rel_tol * max(1, |mu|)`; unmatched values are an error.
pub fn pair_conjugates(
    values: &[Complex64],
    rel_tol: f64,
) -> Result<Vec<(Complex64, Complex64)>, NumericsError> {
    let mut used = vec![false; values.len()];
    let mut pairs = Vec::with_capacity(values.len() / 2);
    for i in 0..values.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let target = values[i].conj();
        let best = (0..values.len())
            .filter(|&j| !used[j])
            .map(|j| (j, (values[j] - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let tol = rel_tol * values[i].norm().max(1.0);
        match best {
            Some((j, dist)) if dist <= tol => {
                used[j] = true;
                pairs.push((values[i], values[j]));
            }
            _ => return Err(NumericsError::UnpairedEigenvalue { value: values[i] }),
        }
    }
    Ok(pairs)
}
