//! Dense quaternionic matrices and their real and complex images.
//!
//! A `QMatrix` acts on column vectors of quaternions from the left, with
//! scalars acting on the right: `(T x)_i = sum_k T_ik x_k`. Two embeddings turn
//! questions about such operators into ordinary numerics:
//!
//! * [`RealOp`]: the `4n x 4n` real matrix of any R-linear map on `H^n`, with
//!   `x` flattened coordinate-major as `(a0, a1, a2, a3)` per coordinate. This
//!   is where `T_lambda : x -> x lambda - T x` lives.
//! * [`ComplexAdjoint`]: writing `T = A + B j` with complex `A`, `B` on the
//!   slice `{1, i}`, the `2n x 2n` matrix `[[A, B], [-conj(B), conj(A)]]`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::{self, Mat, NumericsError};
use crate::quat::Quaternion;

#[derive(Debug, thiserror::Error)]
pub enum QMatrixError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix data is not square: n = {n}, row {row} has {len} entries")]
    NotSquare { n: usize, row: usize, len: usize },
    #[error("matrix data is not square: n = {n} but {rows} rows given")]
    RowCount { n: usize, rows: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("not a complex adjoint: block structure violated by {residual:e}")]
    NotAdjoint { residual: f64 },
    #[error("invalid matrix JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Square quaternionic matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixFile", into = "MatrixFile")]
pub struct QMatrix {
    n: usize,
    entries: Vec<Quaternion>,
}

/// On-disk layout: `{"n": 2, "entries": [[[a0,a1,a2,a3], ...], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixFile {
    n: usize,
    entries: Vec<Vec<Quaternion>>,
}

impl TryFrom<MatrixFile> for QMatrix {
    type Error = QMatrixError;
    fn try_from(file: MatrixFile) -> Result<Self, QMatrixError> {
        if file.entries.len() != file.n {
            return Err(QMatrixError::RowCount {
                n: file.n,
                rows: file.entries.len(),
            });
        }
        Self::from_rows(file.entries)
    }
}

impl From<QMatrix> for MatrixFile {
    fn from(t: QMatrix) -> Self {
        MatrixFile {
            n: t.n,
            entries: t.entries.chunks(t.n.max(1)).map(<[Quaternion]>::to_vec).collect(),
        }
    }
}

impl QMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![Quaternion::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![Quaternion::ONE; n])
    }

    pub fn from_diagonal(d: &[Quaternion]) -> Self {
        let n = d.len();
        Self::from_fn(n, |i, k| if i == k { d[i] } else { Quaternion::ZERO })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for k in 0..n {
                entries.push(f(i, k));
            }
        }
        Self { n, entries }
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion>>) -> Result<Self, QMatrixError> {
        let n = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(QMatrixError::NotSquare {
                    n,
                    row,
                    len: r.len(),
                });
            }
            if let Some(col) = r.iter().position(|q| !q.is_finite()) {
                return Err(QMatrixError::NonFinite { row, col });
            }
        }
        Ok(Self {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// I.i.d. standard normal components.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::from_fn(n, |_, _| Quaternion::random_normal(rng))
    }

    /// `(A + A*) / 2` for a random `A`.
    pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let a = Self::random(n, rng);
        let h = &a + &a.adjoint();
        h.scale(0.5)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, k: usize) -> Quaternion {
        self.entries[i * self.n + k]
    }

    pub fn row(&self, i: usize) -> &[Quaternion] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }

    /// `(T x)_i = sum_k T_ik x_k`.
    pub fn matvec(&self, x: &[Quaternion]) -> Result<Vec<Quaternion>, QMatrixError> {
        if x.len() != self.n {
            return Err(QMatrixError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Quaternion::ZERO, |acc, (&t, &xk)| acc + t * xk)
            })
            .collect())
    }

    pub fn scale(&self, r: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|&q| q * r).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, k| self.get(k, i).conj())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|k| self.get(i, k).max_abs_diff(self.get(k, i).conj()) <= tol))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.max_abs_diff(*b))
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `T^2 - 2 Re(lambda) T + |lambda|^2 I`.
    pub fn build_delta(&self, lambda: Quaternion) -> Self {
        let sq = self * self;
        let lin = self.scale(2.0 * lambda.re());
        let id = Self::identity(self.n).scale(lambda.norm_sqr());
        &(&sq - &lin) + &id
    }

    /// `x -> x lambda - T x` as a real `4n x 4n` matrix.
    pub fn build_t_lambda(&self, lambda: Quaternion) -> RealOp {
        &right_mult_embed(lambda, self.n) - &self.real_embed()
    }

    pub fn real_embed(&self) -> RealOp {
        let n = self.n;
        let mut m = Mat::zeros(4 * n, 4 * n);
        for i in 0..n {
            for k in 0..n {
                let block = left_mult_block(self.get(i, k));
                for r in 0..4 {
                    for c in 0..4 {
                        m[(4 * i + r, 4 * k + c)] = block[r][c];
                    }
                }
            }
        }
        RealOp { n, m }
    }

    pub fn complex_adjoint(&self) -> ComplexAdjoint {
        let n = self.n;
        let mut m = Mat::zeros(2 * n, 2 * n);
        for i in 0..n {
            for k in 0..n {
                let (a, b) = split(self.get(i, k));
                m[(i, k)] = a;
                m[(i, n + k)] = b;
                m[(n + i, k)] = -b.conj();
                m[(n + i, n + k)] = a.conj();
            }
        }
        ComplexAdjoint { n, m }
    }

    /// Operator norm `sup ||T x|| / ||x||`, the largest singular value of the complex adjoint.
    pub fn norm(&self) -> Result<f64, QMatrixError> {
        if self.n == 0 {
            return Ok(0.0);
        }
        Ok(numerics::sigma_max(self.complex_adjoint().matrix())?.value)
    }

    /// Parses `{"n": .., "entries": [[[a0, a1, a2, a3], ..], ..]}`.
    pub fn from_json_str(s: &str) -> Result<Self, QMatrixError> {
        let file: MatrixFile = serde_json::from_str(s)?;
        Self::try_from(file)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization is infallible")
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.n, o.n);
        QMatrix {
            n: self.n,
            entries: self.entries.iter().zip(&o.entries).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.n, o.n);
        QMatrix {
            n: self.n,
            entries: self.entries.iter().zip(&o.entries).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.n, o.n);
        let n = self.n;
        QMatrix::from_fn(n, |i, k| {
            (0..n).fold(Quaternion::ZERO, |acc, l| acc + self.get(i, l) * o.get(l, k))
        })
    }
}

/// `q = (a0 + a1 i) + (a2 + a3 i) j`.
fn split(q: Quaternion) -> (Complex64, Complex64) {
    (Complex64::new(q.a0, q.a1), Complex64::new(q.a2, q.a3))
}

fn left_mult_block(p: Quaternion) -> [[f64; 4]; 4] {
    let mut b = [[0.0; 4]; 4];
    for (c, e) in Quaternion::BASIS.iter().enumerate() {
        let col = (p * *e).to_array();
        for r in 0..4 {
            b[r][c] = col[r];
        }
    }
    b
}

fn right_mult_block(lambda: Quaternion) -> [[f64; 4]; 4] {
    let mut b = [[0.0; 4]; 4];
    for (c, e) in Quaternion::BASIS.iter().enumerate() {
        let col = (*e * lambda).to_array();
        for r in 0..4 {
            b[r][c] = col[r];
        }
    }
    b
}

/// `x -> x lambda` on `H^n`, block diagonal.
pub fn right_mult_embed(lambda: Quaternion, n: usize) -> RealOp {
    let block = right_mult_block(lambda);
    let mut m = Mat::zeros(4 * n, 4 * n);
    for i in 0..n {
        for r in 0..4 {
            for c in 0..4 {
                m[(4 * i + r, 4 * i + c)] = block[r][c];
            }
        }
    }
    RealOp { n, m }
}

/// The real `4 x 4` matrix of `x -> x lambda - d x` on a single coordinate.
pub fn t_lambda_block(d: Quaternion, lambda: Quaternion) -> Mat<f64> {
    let r = right_mult_block(lambda);
    let l = left_mult_block(d);
    Mat::from_fn(4, 4, |i, j| r[i][j] - l[i][j])
}

/// R-linear map on `H^n` as a `4n x 4n` real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RealOp {
    n: usize,
    m: Mat<f64>,
}

impl RealOp {
    pub fn from_matrix(n: usize, m: Mat<f64>) -> Result<Self, QMatrixError> {
        if m.rows() != 4 * n || m.cols() != 4 * n {
            return Err(QMatrixError::DimensionMismatch {
                expected: 4 * n,
                got: m.rows(),
            });
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> Mat<f64> {
        self.m
    }

    pub fn apply(&self, x: &[Quaternion]) -> Vec<Quaternion> {
        assert_eq!(x.len(), self.n, "RealOp::apply dimension mismatch");
        unflatten(&self.m.matvec(&flatten(x)))
    }

    pub fn sigma_min(&self) -> Result<f64, NumericsError> {
        Ok(numerics::sigma_min(&self.m)?.value)
    }
}

impl Add for &RealOp {
    type Output = RealOp;
    fn add(self, o: &RealOp) -> RealOp {
        RealOp {
            n: self.n,
            m: &self.m + &o.m,
        }
    }
}

impl Sub for &RealOp {
    type Output = RealOp;
    fn sub(self, o: &RealOp) -> RealOp {
        RealOp {
            n: self.n,
            m: &self.m - &o.m,
        }
    }
}

/// Composition: `(S * T)(x) = S(T(x))`.
impl Mul for &RealOp {
    type Output = RealOp;
    fn mul(self, o: &RealOp) -> RealOp {
        RealOp {
            n: self.n,
            m: &self.m * &o.m,
        }
    }
}

/// `[[A, B], [-conj(B), conj(A)]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexAdjoint {
    n: usize,
    m: Mat<Complex64>,
}

impl ComplexAdjoint {
    /// Validates the block structure to `1e-12` relative to the largest entry.
    pub fn from_matrix(m: Mat<Complex64>) -> Result<Self, QMatrixError> {
        if !m.is_square() || m.rows() % 2 != 0 {
            return Err(QMatrixError::DimensionMismatch {
                expected: 2 * (m.rows() / 2),
                got: m.cols(),
            });
        }
        let n = m.rows() / 2;
        let mut residual: f64 = 0.0;
        for i in 0..n {
            for k in 0..n {
                residual = residual
                    .max((m[(n + i, n + k)] - m[(i, k)].conj()).norm())
                    .max((m[(n + i, k)] + m[(i, n + k)].conj()).norm());
            }
        }
        if residual > 1e-12 * m.max_abs().max(1.0) {
            return Err(QMatrixError::NotAdjoint { residual });
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.m
    }

    /// Recovers `T = A + B j`.
    pub fn to_qmatrix(&self) -> QMatrix {
        let n = self.n;
        QMatrix::from_fn(n, |i, k| {
            let a = self.m[(i, k)];
            let b = self.m[(i, n + k)];
            Quaternion::new(a.re, a.im, b.re, b.im)
        })
    }
}

impl Mul for &ComplexAdjoint {
    type Output = ComplexAdjoint;
    fn mul(self, o: &ComplexAdjoint) -> ComplexAdjoint {
        ComplexAdjoint {
            n: self.n,
            m: &self.m * &o.m,
        }
    }
}

/// `x -> x alpha`.
pub fn right_scale(x: &[Quaternion], alpha: Quaternion) -> Vec<Quaternion> {
    x.iter().map(|&v| v * alpha).collect()
}

pub fn vec_sub(x: &[Quaternion], y: &[Quaternion]) -> Vec<Quaternion> {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

/// Euclidean norm of a quaternion vector.
pub fn vec_norm(x: &[Quaternion]) -> f64 {
    let m = x.iter().map(|q| q.norm()).fold(0.0, f64::max);
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * x.iter().map(|q| (*q / m).norm_sqr()).sum::<f64>().sqrt()
}

/// Coordinate-major flattening `H^n -> R^{4n}`.
pub fn flatten(x: &[Quaternion]) -> Vec<f64> {
    x.iter().flat_map(|q| q.to_array()).collect()
}

pub fn unflatten(v: &[f64]) -> Vec<Quaternion> {
    assert_eq!(v.len() % 4, 0);
    v.chunks_exact(4)
        .map(|c| Quaternion::new(c[0], c[1], c[2], c[3]))
        .collect()
}

pub fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Quaternion> {
    (0..n).map(|_| Quaternion::random_normal(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::seeded_rng;

    const ONE: Quaternion = Quaternion::ONE;
    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const K: Quaternion = Quaternion::K;
    const Z: Quaternion = Quaternion::ZERO;

    fn real_rows(rows: &[&[f64]]) -> Mat<f64> {
        Mat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    // Matrix whose columns are the images of the basis under `f`.
    fn basis_matrix(f: impl Fn(Quaternion) -> Quaternion) -> Mat<f64> {
        Mat::from_fn(4, 4, |r, c| f(Quaternion::BASIS[c]).to_array()[r])
    }

    #[test]
    fn matvec_examples() {
        let x = vec![Quaternion::new(1.0, 2.0, 3.0, 4.0), Quaternion::new(-1.0, 0.5, 0.0, 2.0)];
        assert_eq!(QMatrix::identity(2).matvec(&x).unwrap(), x);
        let d = QMatrix::from_diagonal(&[I]);
        assert_eq!(d.matvec(&[J]).unwrap(), vec![K]);
        assert!(matches!(
            d.matvec(&x),
            Err(QMatrixError::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn t_lambda_examples() {
        assert_eq!(
            QMatrix::zeros(1).build_t_lambda(ONE).into_matrix(),
            Mat::identity(4)
        );
        assert_eq!(
            QMatrix::identity(1).build_t_lambda(ONE).into_matrix(),
            Mat::zeros(4, 4)
        );
        // right multiplication by i: 1 -> i, i -> -1, j -> -k, k -> j
        let expected = real_rows(&[
            &[0.0, -1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, -1.0, 0.0],
        ]);
        assert_eq!(basis_matrix(|e| e * I), expected);
        assert_eq!(QMatrix::zeros(1).build_t_lambda(I).into_matrix(), expected);
        assert_eq!(right_mult_embed(I, 1).into_matrix(), expected);
    }

    #[test]
    fn real_embed_examples() {
        assert_eq!(QMatrix::identity(3).real_embed().into_matrix(), Mat::identity(12));
        // left multiplication by i: 1 -> i, i -> -1, j -> k, k -> -j
        let expected = real_rows(&[
            &[0.0, -1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, -1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]);
        assert_eq!(basis_matrix(|e| I * e), expected);
        assert_eq!(QMatrix::from_diagonal(&[I]).real_embed().into_matrix(), expected);
    }

    #[test]
    fn right_mult_embed_scalars() {
        assert_eq!(right_mult_embed(ONE, 2).into_matrix(), Mat::identity(8));
        assert_eq!(
            right_mult_embed(Quaternion::real(2.5), 2).into_matrix(),
            Mat::identity(8).scaled(2.5)
        );
    }

    #[test]
    fn complex_adjoint_examples() {
        let c = Complex64::new;
        let adj_j = QMatrix::from_diagonal(&[J]).complex_adjoint();
        assert_eq!(
            adj_j.matrix(),
            &Mat::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(-1.0, 0.0), c(0.0, 0.0)]])
        );
        let adj_i = QMatrix::from_diagonal(&[I]).complex_adjoint();
        assert_eq!(
            adj_i.matrix(),
            &Mat::from_rows(&[vec![c(0.0, 1.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, -1.0)]])
        );
        let t = QMatrix::random(3, &mut seeded_rng(5));
        let adj = t.complex_adjoint();
        assert!(ComplexAdjoint::from_matrix(adj.matrix().clone()).is_ok());
        assert_eq!(adj.to_qmatrix(), t);
        let mut broken = adj.matrix().clone();
        broken[(3, 3)] += c(1e-6, 0.0);
        assert!(matches!(
            ComplexAdjoint::from_matrix(broken),
            Err(QMatrixError::NotAdjoint { .. })
        ));
    }

    #[test]
    fn delta_examples() {
        let t = QMatrix::from_diagonal(&[I]);
        assert_eq!(t.build_delta(I), QMatrix::zeros(1));
        let q = Quaternion::new(1.0, -2.0, 0.5, 3.0);
        let delta0 = QMatrix::zeros(3).build_delta(q);
        assert!(delta0.max_abs_diff(&QMatrix::identity(3).scale(q.norm_sqr())) < 1e-14);
        let nil = QMatrix::from_rows(vec![vec![Z, ONE], vec![Z, Z]]).unwrap();
        let expected = QMatrix::from_rows(vec![
            vec![ONE, Quaternion::real(-2.0)],
            vec![Z, ONE],
        ])
        .unwrap();
        assert_eq!(nil.build_delta(ONE), expected);
    }

    #[test]
    fn adjoint_examples() {
        let d = QMatrix::from_diagonal(&[Quaternion::real(2.0), Quaternion::real(-1.0)]);
        assert_eq!(d.adjoint(), d);
        assert_eq!(QMatrix::from_diagonal(&[I]).adjoint(), QMatrix::from_diagonal(&[-I]));
    }

    #[test]
    fn norm_of_simple_operators() {
        assert!((QMatrix::identity(4).norm().unwrap() - 1.0).abs() < 1e-14);
        let nil = QMatrix::from_rows(vec![vec![Z, Quaternion::real(2.0)], vec![Z, Z]]).unwrap();
        assert!((nil.norm().unwrap() - 2.0).abs() < 1e-14);
        assert!((QMatrix::from_diagonal(&[Quaternion::new(0.0, 3.0, 4.0, 0.0)]).norm().unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let t = QMatrix::from_rows(vec![vec![ONE, I], vec![J, K]]).unwrap();
        let s = t.to_json_string();
        assert_eq!(
            s,
            r#"{"n":2,"entries":[[[1.0,0.0,0.0,0.0],[0.0,1.0,0.0,0.0]],[[0.0,0.0,1.0,0.0],[0.0,0.0,0.0,1.0]]]}"#
        );
        assert_eq!(QMatrix::from_json_str(&s).unwrap(), t);

        let ragged = r#"{"n":2,"entries":[[[1,0,0,0],[0,0,0,0]],[[1,0,0,0]]]}"#;
        assert!(matches!(
            QMatrix::from_json_str(ragged),
            Err(QMatrixError::NotSquare { n: 2, row: 1, len: 1 })
        ));
        let short = r#"{"n":3,"entries":[[[1,0,0,0]]]}"#;
        assert!(matches!(
            QMatrix::from_json_str(short),
            Err(QMatrixError::RowCount { n: 3, rows: 1 })
        ));
        let err = QMatrix::from_json_str("{\"n\": 1,\n \"entries\": [[[1,0,0]]]}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }
}
