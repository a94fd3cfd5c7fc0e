use super::matrix::{Mat, Scalar};
use super::{check_square, NumericsError};

/// LU factorization with partial pivoting, `P A = L U`.
///
/// Columns with no nonzero candidate pivot are skipped rather than rejected, so
/// exactly singular matrices still factor and expose a kernel vector.
#[derive(Clone, Debug)]
pub struct Lu<S> {
    lu: Mat<S>,
    perm: Vec<usize>,
    zero_pivot: Option<usize>,
}

impl<S: Scalar> Lu<S> {
    pub fn new(m: &Mat<S>) -> Result<Self, NumericsError> {
        let n = check_square(m)?;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut zero_pivot = None;

        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].modulus()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 {
                zero_pivot.get_or_insert(k);
                continue;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            let (upper, lower) = lu_rows_split(&mut lu, k);
            let pivot_row = &upper[k + 1..];
            for row in lower.chunks_mut(n) {
                if row[k] == S::zero() {
                    continue;
                }
                let l = row[k] / pivot;
                row[k] = l;
                for (a, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *a -= l * u;
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            zero_pivot,
        })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// True when some pivot column was exactly zero.
    pub fn is_singular(&self) -> bool {
        self.zero_pivot.is_some()
    }

    /// Smallest pivot modulus; zero for singular factors.
    pub fn min_pivot(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.lu[(i, i)].modulus())
            .fold(f64::INFINITY, f64::min)
    }

    /// Solves `A x = b` in place. Meaningless if the factor is singular.
    pub fn solve_in_place(&self, b: &mut [S]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y: Vec<S> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = y[i];
            for j in 0..i {
                s -= row[j] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = y[i];
            for j in i + 1..n {
                s -= row[j] * y[j];
            }
            y[i] = s / row[i];
        }
        b.copy_from_slice(&y);
    }

    /// Solves `A^H x = b` in place.
    pub fn solve_adjoint_in_place(&self, b: &mut [S]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        // U^H z = b, forward; accumulate column-wise to stay row-major friendly.
        let mut z = b.to_vec();
        for i in 0..n {
            let row = self.lu.row(i);
            z[i] = z[i] / row[i].conj();
            let zi = z[i];
            for j in i + 1..n {
                z[j] -= row[j].conj() * zi;
            }
        }
        // L^H w = z, backward, unit diagonal.
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let zi = z[i];
            for j in 0..i {
                z[j] -= row[j].conj() * zi;
            }
        }
        for (i, &p) in self.perm.iter().enumerate() {
            b[p] = z[i];
        }
    }

    /// A unit vector `x` with `A x = 0`, when a zero pivot was met.
    pub fn kernel_vector(&self) -> Option<Vec<S>> {
        let k = self.zero_pivot?;
        let n = self.dim();
        let mut x = vec![S::zero(); n];
        x[k] = S::one();
        for j in (0..k).rev() {
            let row = self.lu.row(j);
            let mut s = S::zero();
            for l in j + 1..=k {
                s += row[l] * x[l];
            }
            x[j] = -s / row[j];
        }
        let nrm = super::matrix::vec_norm(&x);
        Some(x.into_iter().map(|v| v.scale(1.0 / nrm)).collect())
    }
}

fn lu_rows_split<S: Scalar>(lu: &mut Mat<S>, k: usize) -> (&[S], &mut [S]) {
    let n = lu.cols();
    let (head, tail) = lu.as_mut_slice().split_at_mut((k + 1) * n);
    (&head[k * n..], tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn solves_real_system() {
        let a = Mat::from_rows(&[
            vec![0.0, 2.0, 1.0],
            vec![1.0, 1.0, 0.0],
            vec![3.0, 0.0, 1.0],
        ]);
        let x = [1.0, -2.0, 0.5];
        let mut b = a.matvec(&x);
        let lu = Lu::new(&a).unwrap();
        assert!(!lu.is_singular());
        lu.solve_in_place(&mut b);
        for (u, v) in b.iter().zip(x) {
            assert!((u - v).abs() < 1e-14);
        }
        let mut c = a.conj_transpose().matvec(&x);
        lu.solve_adjoint_in_place(&mut c);
        for (u, v) in c.iter().zip(x) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn solves_complex_adjoint_system() {
        let c = |re, im| Complex64::new(re, im);
        let a = Mat::from_rows(&[
            vec![c(1.0, 1.0), c(0.0, 2.0)],
            vec![c(-1.0, 0.5), c(3.0, -1.0)],
        ]);
        let x = [c(0.25, -1.0), c(2.0, 0.0)];
        let mut b = a.conj_transpose().matvec(&x);
        Lu::new(&a).unwrap().solve_adjoint_in_place(&mut b);
        for (u, v) in b.iter().zip(x) {
            assert!((u - v).norm() < 1e-14);
        }
    }

    #[test]
    fn kernel_of_singular_matrix() {
        let a = Mat::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let lu = Lu::new(&a).unwrap();
        assert!(lu.is_singular());
        let x = lu.kernel_vector().unwrap();
        let r = a.matvec(&x);
        assert!(r.iter().all(|v| v.abs() < 1e-14));
        assert!((super::super::matrix::vec_norm(&x) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_kernel_is_first_basis_vector() {
        let lu = Lu::new(&Mat::<f64>::zeros(3, 3)).unwrap();
        assert_eq!(lu.kernel_vector().unwrap(), vec![1.0, 0.0, 0.0]);
    }
}
