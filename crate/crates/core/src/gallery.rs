//! Structured operators on sequence spaces, seen through finite sections.
//!
//! The infinite kinds are truncated to their first `N` coordinates; a
//! [`TrendReport`] follows `sigma_min(T_lambda)` as `N` grows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numerics::{self, NumericsError};
use crate::qmat::{t_lambda_block, QMatrix, QMatrixError};
use crate::quat::Quaternion;

#[derive(Debug, thiserror::Error)]
pub enum GalleryError {
    #[error("truncation must be at least 2 for {0:?}, got {1}")]
    Truncation(Kind, usize),
    #[error("truncation {requested} exceeds the available size {available}")]
    TooLarge { requested: usize, available: usize },
    #[error("{0:?} needs params.{1}")]
    MissingParams(Kind, &'static str),
    #[error("diagonal sequence is unbounded or non-finite at index {0}")]
    Unbounded(usize),
    #[error("eigen-witness needs |lambda| < 1, got {0}")]
    OutsideUnitBall(f64),
    #[error("sizes must be strictly increasing with at least 3 entries, each >= 2: {0:?}")]
    Sizes(Vec<usize>),
    #[error("invalid operator JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Matrix(#[from] QMatrixError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    FiniteMatrix,
    RightShift,
    BackwardShift,
    DiagonalSequence,
}

/// Diagonal generators `d_1, d_2, ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum DiagonalPreset {
    /// `d_k = value`.
    Constant { value: Quaternion },
    /// `d_k = limit (1 - 1/k)`.
    Convergent { limit: Quaternion },
    /// `d_k = values[k - 1]`; truncation may not exceed the list.
    List { values: Vec<Quaternion> },
}

impl DiagonalPreset {
    pub fn entry(&self, k: usize) -> Quaternion {
        assert!(k >= 1, "sequence is 1-based");
        match self {
            Self::Constant { value } => *value,
            Self::Convergent { limit } => *limit * (1.0 - 1.0 / k as f64),
            Self::List { values } => values[k - 1],
        }
    }

    /// `sup_k |d_k|` over the whole sequence.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Self::Constant { value } => value.norm(),
            Self::Convergent { limit } => limit.norm(),
            Self::List { values } => values.iter().map(|q| q.norm()).fold(0.0, f64::max),
        }
    }

    fn check(&self) -> Result<(), GalleryError> {
        match self {
            Self::Constant { value: q } | Self::Convergent { limit: q } if !q.is_finite() => {
                Err(GalleryError::Unbounded(1))
            }
            Self::List { values } => match values.iter().position(|q| !q.is_finite()) {
                Some(i) => Err(GalleryError::Unbounded(i + 1)),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<QMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<DiagonalPreset>,
}

/// `{"kind": ..., "truncation": N, "params": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub kind: Kind,
    /// For `finite_matrix`, the leading `N x N` block; defaults to the whole matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default)]
    pub params: Params,
}

impl OperatorSpec {
    pub fn right_shift(n: usize) -> Self {
        Self::bare(Kind::RightShift, n)
    }

    pub fn backward_shift(n: usize) -> Self {
        Self::bare(Kind::BackwardShift, n)
    }

    pub fn diagonal(preset: DiagonalPreset, n: usize) -> Self {
        Self {
            kind: Kind::DiagonalSequence,
            truncation: Some(n),
            params: Params {
                matrix: None,
                sequence: Some(preset),
            },
        }
    }

    pub fn finite(t: QMatrix) -> Self {
        Self {
            kind: Kind::FiniteMatrix,
            truncation: None,
            params: Params {
                matrix: Some(t),
                sequence: None,
            },
        }
    }

    fn bare(kind: Kind, n: usize) -> Self {
        Self {
            kind,
            truncation: Some(n),
            params: Params::default(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self, GalleryError> {
        let spec: Self = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Same operator, different section size.
    pub fn with_truncation(&self, n: usize) -> Self {
        Self {
            truncation: Some(n),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), GalleryError> {
        match self.kind {
            Kind::FiniteMatrix => {
                let t = self.matrix()?;
                if let Some(n) = self.truncation {
                    if n == 0 || n > t.n() {
                        return Err(GalleryError::TooLarge {
                            requested: n,
                            available: t.n(),
                        });
                    }
                }
                Ok(())
            }
            // truncation may be left out when the sizes come from elsewhere (trend)
            kind => {
                if let Some(n) = self.truncation.filter(|&n| n < 2) {
                    return Err(GalleryError::Truncation(kind, n));
                }
                if kind == Kind::DiagonalSequence {
                    let seq = self.sequence()?;
                    seq.check()?;
                    if let (DiagonalPreset::List { values }, Some(n)) = (seq, self.truncation) {
                        if n > values.len() {
                            return Err(GalleryError::TooLarge {
                                requested: n,
                                available: values.len(),
                            });
                        }
                    }
                }
                Ok(())
            }
        }
    }

    fn matrix(&self) -> Result<&QMatrix, GalleryError> {
        self.params
            .matrix
            .as_ref()
            .ok_or(GalleryError::MissingParams(self.kind, "matrix"))
    }

    fn sequence(&self) -> Result<&DiagonalPreset, GalleryError> {
        self.params
            .sequence
            .as_ref()
            .ok_or(GalleryError::MissingParams(self.kind, "sequence"))
    }

    fn size(&self) -> Result<usize, GalleryError> {
        match (self.kind, self.truncation) {
            (Kind::FiniteMatrix, None) => Ok(self.matrix()?.n()),
            (_, Some(n)) => Ok(n),
            (kind, None) => Err(GalleryError::Truncation(kind, 0)),
        }
    }
}

/// The `N x N` finite section.
pub fn materialize(spec: &OperatorSpec) -> Result<QMatrix, GalleryError> {
    spec.validate()?;
    let n = spec.size()?;
    let one = Quaternion::ONE;
    let zero = Quaternion::ZERO;
    Ok(match spec.kind {
        Kind::FiniteMatrix => {
            let t = spec.matrix()?;
            QMatrix::from_fn(n, |i, k| t.get(i, k))
        }
        // (S x)_{k+1} = x_k
        Kind::RightShift => QMatrix::from_fn(n, |i, k| if i == k + 1 { one } else { zero }),
        // (S* x)_k = x_{k+1}
        Kind::BackwardShift => QMatrix::from_fn(n, |i, k| if k == i + 1 { one } else { zero }),
        Kind::DiagonalSequence => {
            let seq = spec.sequence()?;
            QMatrix::from_diagonal(&(1..=n).map(|k| seq.entry(k)).collect::<Vec<_>>())
        }
    })
}

/// `x_k = lambda^(k-1)`, normalized: an eigenvector of the backward shift up to
/// a tail of size `|lambda|^N`.
pub fn eigenwitness_backward_shift(lambda: Quaternion, n: usize) -> Result<Vec<Quaternion>, GalleryError> {
    let r = lambda.norm();
    if !(r < 1.0) {
        return Err(GalleryError::OutsideUnitBall(r));
    }
    let mut x = Vec::with_capacity(n);
    let mut p = Quaternion::ONE;
    for _ in 0..n {
        x.push(p);
        p = p * lambda;
    }
    let norm = crate::qmat::vec_norm(&x);
    Ok(x.into_iter().map(|q| q / norm).collect())
}

/// `sigma_min(T_lambda)` of the section at size `n`. Diagonal sequences use
/// their `4 x 4` block structure instead of a dense `4n x 4n` matrix.
pub fn sigma_min_at(spec: &OperatorSpec, lambda: Quaternion, n: usize) -> Result<f64, GalleryError> {
    let section = spec.with_truncation(n);
    if spec.kind == Kind::DiagonalSequence {
        section.validate()?;
        let seq = section.sequence()?;
        let mut best = f64::INFINITY;
        for k in 1..=n {
            let block = t_lambda_block(seq.entry(k), lambda);
            best = best.min(numerics::sigma_min(&block)?.value);
        }
        return Ok(best);
    }
    sigma_min_dense(&section, lambda)
}

/// `sigma_min(T_lambda)` through the dense real embedding of the section.
pub fn sigma_min_dense(spec: &OperatorSpec, lambda: Quaternion) -> Result<f64, GalleryError> {
    let t = materialize(spec)?;
    Ok(t.build_t_lambda(lambda).sigma_min()?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Vanishing,
    BoundedAway,
    Inconclusive,
}

/// Vanishing: non-increasing with `last <= 1e-3 first` (an all-zero run counts).
/// Bounded away: `min >= 0.5 max` and `min >= 1e-3`.
pub fn classify_trend(values: &[f64]) -> Verdict {
    let (first, last) = match (values.first(), values.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Verdict::Inconclusive,
    };
    let non_increasing = values.windows(2).all(|w| w[1] <= w[0]);
    if non_increasing && last <= 1e-3 * first {
        return Verdict::Vanishing;
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(0.0, f64::max);
    if min >= 0.5 * max && min >= 1e-3 {
        Verdict::BoundedAway
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub kind: Kind,
    pub lambda: Quaternion,
    pub sizes: Vec<usize>,
    pub sigma_min_values: Vec<f64>,
    pub verdict: Verdict,
}

/// `sigma_min(T_lambda)` of the sections at each size, with a verdict.
pub fn trend(spec: &OperatorSpec, lambda: Quaternion, sizes: &[usize]) -> Result<TrendReport, GalleryError> {
    let increasing = sizes.windows(2).all(|w| w[0] < w[1]);
    if sizes.len() < 3 || !increasing || sizes[0] < 2 {
        return Err(GalleryError::Sizes(sizes.to_vec()));
    }
    let sigma_min_values = sizes
        .par_iter()
        .map(|&n| sigma_min_at(spec, lambda, n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TrendReport {
        kind: spec.kind,
        lambda,
        sizes: sizes.to_vec(),
        verdict: classify_trend(&sigma_min_values),
        sigma_min_values,
    })
}
