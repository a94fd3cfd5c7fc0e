//! Quaternion arithmetic and similarity classes.
//!
//! A quaternion `q = a0 + a1 i + a2 j + a3 k` is similar to `p` when `p = s* q s`
//! for some unit `s`. Similarity classes are 2-spheres `{re + u * r : u pure, |u| = 1}`
//! and are described here by the pair `(re, r)` ([`SimilaritySphere`]).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Name of the generator behind every seeded stream in the crate.
pub const GENERATOR: &str = "ChaCha8Rng::seed_from_u64 (rand_chacha 0.9)";

/// Default comparison tolerance for spheres.
pub const SPHERE_TOL: f64 = 1e-8;

/// Seeded generator used throughout the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum QuatError {
    #[error("cannot normalize quaternion with norm {0:e}")]
    Degenerate(f64),
}

/// An element of the quaternion algebra. Serialized as `[a0, a1, a2, a3]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    /// The basis `(1, i, j, k)` in coordinate order.
    pub const BASIS: [Quaternion; 4] = [Self::ONE, Self::I, Self::J, Self::K];

    pub const fn new(a0: f64, a1: f64, a2: f64, a3: f64) -> Self {
        Self { a0, a1, a2, a3 }
    }

    pub const fn real(r: f64) -> Self {
        Self::new(r, 0.0, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a0, self.a1, self.a2, self.a3]
    }

    pub fn conj(self) -> Self {
        Self::new(self.a0, -self.a1, -self.a2, -self.a3)
    }

    pub fn re(self) -> f64 {
        self.a0
    }

    pub fn im(self) -> Self {
        Self::new(0.0, self.a1, self.a2, self.a3)
    }

    pub fn norm_sqr(self) -> f64 {
        self.a0 * self.a0 + self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3
    }

    pub fn norm(self) -> f64 {
        let m = self
            .a0
            .abs()
            .max(self.a1.abs())
            .max(self.a2.abs())
            .max(self.a3.abs());
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        let s = self / m;
        m * s.norm_sqr().sqrt()
    }

    /// `|Im(q)|`, the radius of the similarity sphere through `q`.
    pub fn im_norm(self) -> f64 {
        self.im().norm()
    }

    pub fn is_finite(self) -> bool {
        self.a0.is_finite() && self.a1.is_finite() && self.a2.is_finite() && self.a3.is_finite()
    }

    pub fn is_real(self) -> bool {
        self.a1 == 0.0 && self.a2 == 0.0 && self.a3 == 0.0
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        let n2 = self.norm_sqr();
        (n2 > 0.0).then(|| self.conj() / n2)
    }

    pub fn similarity_class(self) -> SimilaritySphere {
        SimilaritySphere {
            re: self.a0,
            im_radius: self.im_norm(),
        }
    }

    /// `s* q s`.
    pub fn conjugate_by(self, s: UnitQuaternion) -> Self {
        let s = s.get();
        s.conj() * self * s
    }

    /// Largest absolute difference between components.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        let d = self - other;
        d.a0.abs().max(d.a1.abs()).max(d.a2.abs()).max(d.a3.abs())
    }

    /// Four i.i.d. standard normal components.
    pub fn random_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        )
    }
}

impl From<[f64; 4]> for Quaternion {
    fn from(a: [f64; 4]) -> Self {
        Self::from_array(a)
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        q.to_array()
    }
}

impl From<f64> for Quaternion {
    fn from(r: f64) -> Self {
        Self::real(r)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:+}i {:+}j {:+}k",
            self.a0, self.a1, self.a2, self.a3
        )
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a0 + o.a0, self.a1 + o.a1, self.a2 + o.a2, self.a3 + o.a3)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a0 - o.a0, self.a1 - o.a1, self.a2 - o.a2, self.a3 - o.a3)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a0, -self.a1, -self.a2, -self.a3)
    }
}

/// Hamilton product, `i^2 = j^2 = k^2 = ijk = -1`.
impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.a0 * b.a0 - a.a1 * b.a1 - a.a2 * b.a2 - a.a3 * b.a3,
            a.a0 * b.a1 + a.a1 * b.a0 + a.a2 * b.a3 - a.a3 * b.a2,
            a.a0 * b.a2 - a.a1 * b.a3 + a.a2 * b.a0 + a.a3 * b.a1,
            a.a0 * b.a3 + a.a1 * b.a2 - a.a2 * b.a1 + a.a3 * b.a0,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, r: f64) -> Self {
        Self::new(self.a0 * r, self.a1 * r, self.a2 * r, self.a3 * r)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    fn div(self, r: f64) -> Self {
        Self::new(self.a0 / r, self.a1 / r, self.a2 / r, self.a3 / r)
    }
}

/// A quaternion of modulus one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(into = "[f64; 4]")]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub const ONE: UnitQuaternion = UnitQuaternion(Quaternion::ONE);

    /// Renormalizes `q`; rejects `|q| < 1e-300` and non-finite input.
    pub fn new(q: Quaternion) -> Result<Self, QuatError> {
        let n = q.norm();
        if !n.is_finite() || n < 1e-300 {
            return Err(QuatError::Degenerate(n));
        }
        let u = q / n;
        // second pass brings | |u| - 1 | down to a couple of ulps
        Ok(Self(u / u.norm()))
    }

    pub fn get(self) -> Quaternion {
        self.0
    }

    /// Uniform on the unit 3-sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            if let Ok(u) = Self::new(Quaternion::random_normal(rng)) {
                return u;
            }
        }
    }
}

impl From<UnitQuaternion> for [f64; 4] {
    fn from(u: UnitQuaternion) -> Self {
        u.0.to_array()
    }
}

impl From<UnitQuaternion> for Quaternion {
    fn from(u: UnitQuaternion) -> Self {
        u.0
    }
}

/// A similarity class `[q]`, stored as `(Re q, |Im q|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilaritySphere {
    pub re: f64,
    pub im_radius: f64,
}

impl SimilaritySphere {
    /// Panics if `im_radius` is negative or NaN.
    pub fn new(re: f64, im_radius: f64) -> Self {
        assert!(im_radius >= 0.0, "im_radius must be nonnegative, got {im_radius}");
        Self { re, im_radius }
    }

    /// `re + im_radius * i`, the point of the class in the upper half of the `{1, i}` slice.
    pub fn canonical(self) -> Quaternion {
        Quaternion::new(self.re, self.im_radius, 0.0, 0.0)
    }

    pub fn is_point(self) -> bool {
        self.im_radius == 0.0
    }

    /// Modulus shared by every point of the sphere.
    pub fn modulus(self) -> f64 {
        self.re.hypot(self.im_radius)
    }

    /// Distance in the `(re, im_radius)` half-plane.
    pub fn distance(self, other: Self) -> f64 {
        (self.re - other.re).hypot(self.im_radius - other.im_radius)
    }

    pub fn scale(self) -> f64 {
        1f64.max(self.re.abs()).max(self.im_radius)
    }

    /// Componentwise comparison with absolute tolerance `tol * max(1, |re|, im_radius)`.
    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        let t = tol * self.scale().max(other.scale());
        (self.re - other.re).abs() <= t && (self.im_radius - other.im_radius).abs() <= t
    }

    pub fn contains(self, q: Quaternion, tol: f64) -> bool {
        self.approx_eq(q.similarity_class(), tol)
    }
}

impl fmt::Display for SimilaritySphere {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} ; {}]", self.re, self.im_radius)
    }
}

/// A uniformly random unit pure quaternion.
pub fn random_unit_pure<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let u = Quaternion::new(
            0.0,
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = u.norm();
        if n > 1e-150 {
            return u / n;
        }
    }
}

/// A point of the sphere drawn from a seeded stream.
pub fn sample_sphere(sph: SimilaritySphere, seed: u64) -> Quaternion {
    sample_sphere_with(sph, &mut seeded_rng(seed))
}

/// `re + u * im_radius` with `u` uniform on the unit pure quaternions.
/// A degenerate sphere returns its real point exactly.
pub fn sample_sphere_with<R: Rng + ?Sized>(sph: SimilaritySphere, rng: &mut R) -> Quaternion {
    if sph.im_radius == 0.0 {
        return Quaternion::real(sph.re);
    }
    let u = random_unit_pure(rng);
    Quaternion::real(sph.re) + u * sph.im_radius
}
