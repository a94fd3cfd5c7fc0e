use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::membership::MembershipOracle;
use super::SpectralError;
use crate::qmat::QMatrix;
use crate::quat::Quaternion;

pub const CSV_HEADER: &str = "re,im,sigma_min_T_lambda,sigma_min_Delta";

/// Rectangle `[x0, x1] x [y0, y1]` in the upper half of the `{1, i}` slice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self, SpectralError> {
        let w = Self { x0, x1, y0, y1 };
        if ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(SpectralError::InvalidWindow(format!("non-finite bound in {w:?}")));
        }
        if x1 <= x0 || y1 <= y0 {
            return Err(SpectralError::InvalidWindow(format!(
                "degenerate window [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        if y0 < 0.0 {
            return Err(SpectralError::InvalidWindow(format!(
                "y0 = {y0} is below the real axis"
            )));
        }
        Ok(w)
    }

    /// Largest modulus of a window point.
    pub fn max_modulus(&self) -> f64 {
        self.x0.abs().max(self.x1.abs()).hypot(self.y1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub re: f64,
    pub im: f64,
    pub sigma_min_t_lambda: f64,
    pub sigma_min_delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub window: Window,
    pub width: usize,
    pub height: usize,
    /// Row-major: `im` is the outer index, `re` the inner one.
    pub points: Vec<ScanPoint>,
    /// The window reaches outside the ball of radius `1.25 max(1, ||T||)`.
    pub window_exceeds_padded_ball: bool,
}

impl ScanGrid {
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.points.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for p in &self.points {
            let _ = writeln!(
                s,
                "{:?},{:?},{:?},{:?}",
                p.re, p.im, p.sigma_min_t_lambda, p.sigma_min_delta
            );
        }
        s
    }

    /// Grid point with the smallest `sigma_min(T_lambda)`; ties go to the first.
    pub fn argmin_t_lambda(&self) -> Option<&ScanPoint> {
        self.points.iter().fold(None, |best: Option<&ScanPoint>, p| match best {
            Some(b) if b.sigma_min_t_lambda <= p.sigma_min_t_lambda => Some(b),
            _ => Some(p),
        })
    }

    pub fn cell_size(&self) -> (f64, f64) {
        (
            (self.window.x1 - self.window.x0) / (self.width - 1) as f64,
            (self.window.y1 - self.window.y0) / (self.height - 1) as f64,
        )
    }
}

/// Both smallest singular values at `lambda = x + y i` over a `width x height` grid.
pub fn slice_scan(
    t: &QMatrix,
    window: Window,
    width: usize,
    height: usize,
) -> Result<ScanGrid, SpectralError> {
    if width < 2 || height < 2 {
        return Err(SpectralError::InvalidResolution(width, height));
    }
    let oracle = MembershipOracle::new(t, super::DEFAULT_TOL)?;
    let padded = 1.25 * oracle.norm().max(1.0);
    let coord = |k: usize, n: usize, a: f64, b: f64| a + (b - a) * k as f64 / (n - 1) as f64;
    let points = (0..width * height)
        .into_par_iter()
        .map(|idx| {
            let (iy, ix) = (idx / width, idx % width);
            let re = coord(ix, width, window.x0, window.x1);
            let im = coord(iy, height, window.y0, window.y1);
            let lambda = Quaternion::new(re, im, 0.0, 0.0);
            Ok(ScanPoint {
                re,
                im,
                sigma_min_t_lambda: oracle.sigma_min_t_lambda(lambda)?,
                sigma_min_delta: oracle.sigma_min_delta(lambda)?,
            })
        })
        .collect::<Result<Vec<_>, SpectralError>>()?;
    Ok(ScanGrid {
        window,
        width,
        height,
        points,
        window_exceeds_padded_ball: window.max_modulus() > padded,
    })
}
