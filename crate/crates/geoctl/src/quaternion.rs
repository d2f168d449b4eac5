//! Quaternion algebra and the unit sphere S³.
//!
//! Points of the sphere and symmetric Lie-algebra elements both live in ℍ,
//! written scalar-plus-vector: `p = p0 + p⃗`. [`PureQuaternion`] keeps
//! Im ℍ membership at the type level (its scalar part is identically zero),
//! and [`UnitQuaternion`] enforces |q| = 1 at construction.

use std::ops::{Add, Deref, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::{ALGEBRAIC_TOL, MIN_NORM};

/// Element of ℍ with four f64 components.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 4]", from = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn from_parts(re: f64, im: PureQuaternion) -> Self {
        Quaternion::new(re, im.x, im.y, im.z)
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Scalar part p0.
    pub fn re(&self) -> f64 {
        self.w
    }

    /// Imaginary part p⃗.
    pub fn im(&self) -> PureQuaternion {
        PureQuaternion::new(self.x, self.y, self.z)
    }

    pub fn conjugate(&self) -> Quaternion {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Euclidean inner product on ℝ⁴; equals re(p·q̄).
    pub fn dot(&self, other: &Quaternion) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn inverse(&self) -> Result<Quaternion> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.conjugate() / n2)
    }

    /// Normalizes onto S³. Fails on near-zero input.
    pub fn project_to_sphere(&self) -> Result<UnitQuaternion> {
        let n = self.norm();
        if !n.is_finite() || n <= MIN_NORM {
            return Err(Error::DegeneratePoint { norm: n });
        }
        Ok(UnitQuaternion(*self / n))
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }
}

impl From<[f64; 4]> for Quaternion {
    fn from(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        q.as_array()
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(self.w + rhs.w, self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(self.w - rhs.w, self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Quaternion {
        Quaternion::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

/// Quaternion product `p0 q0 − p⃗·q⃗ + p0 q⃗ + q0 p⃗ + p⃗×q⃗`.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        let (p0, q0) = (self.w, rhs.w);
        let p = self.im();
        let q = rhs.im();
        let v = q * p0 + p * q0 + p.cross(&q);
        Quaternion::new(p0 * q0 - p.dot(&q), v.x, v.y, v.z)
    }
}

/// Element of Im ℍ. The scalar part is zero by construction, not by check.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", from = "[f64; 3]")]
pub struct PureQuaternion {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PureQuaternion {
    pub const ZERO: PureQuaternion = PureQuaternion::new(0.0, 0.0, 0.0);
    pub const I: PureQuaternion = PureQuaternion::new(1.0, 0.0, 0.0);
    pub const J: PureQuaternion = PureQuaternion::new(0.0, 1.0, 0.0);
    pub const K: PureQuaternion = PureQuaternion::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        PureQuaternion { x, y, z }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn dot(&self, other: &PureQuaternion) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &PureQuaternion) -> PureQuaternion {
        PureQuaternion::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn normalized(&self) -> Result<PureQuaternion> {
        let n = self.norm();
        if !n.is_finite() || n <= MIN_NORM {
            return Err(Error::DegeneratePoint { norm: n });
        }
        Ok(*self * (1.0 / n))
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for PureQuaternion {
    fn from(a: [f64; 3]) -> Self {
        PureQuaternion::new(a[0], a[1], a[2])
    }
}

impl From<PureQuaternion> for [f64; 3] {
    fn from(p: PureQuaternion) -> Self {
        p.as_array()
    }
}

impl From<PureQuaternion> for Quaternion {
    fn from(p: PureQuaternion) -> Self {
        Quaternion::new(0.0, p.x, p.y, p.z)
    }
}

impl Add for PureQuaternion {
    type Output = PureQuaternion;
    fn add(self, rhs: PureQuaternion) -> PureQuaternion {
        PureQuaternion::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for PureQuaternion {
    type Output = PureQuaternion;
    fn sub(self, rhs: PureQuaternion) -> PureQuaternion {
        PureQuaternion::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for PureQuaternion {
    type Output = PureQuaternion;
    fn neg(self) -> PureQuaternion {
        PureQuaternion::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for PureQuaternion {
    type Output = PureQuaternion;
    fn mul(self, s: f64) -> PureQuaternion {
        PureQuaternion::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Point of S³. `|q| = 1` within [`ALGEBRAIC_TOL`] at construction; flows
/// re-project after every step.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Quaternion", try_from = "Quaternion")]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub const ONE: UnitQuaternion = UnitQuaternion(Quaternion::ONE);
    pub const I: UnitQuaternion = UnitQuaternion(Quaternion::I);
    pub const J: UnitQuaternion = UnitQuaternion(Quaternion::J);
    pub const K: UnitQuaternion = UnitQuaternion(Quaternion::K);

    pub fn try_new(q: Quaternion) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = q.norm();
        if (n - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::NotUnit { norm: n });
        }
        Ok(UnitQuaternion(q))
    }

    pub fn into_inner(self) -> Quaternion {
        self.0
    }

    /// For unit quaternions the inverse is the conjugate.
    pub fn inverse(&self) -> UnitQuaternion {
        UnitQuaternion(self.0.conjugate())
    }

    pub fn antipode(&self) -> UnitQuaternion {
        UnitQuaternion(-self.0)
    }

    /// Chordal distance in ℝ⁴.
    pub fn distance(&self, other: &UnitQuaternion) -> f64 {
        (self.0 - other.0).norm()
    }
}

impl Deref for UnitQuaternion {
    type Target = Quaternion;
    fn deref(&self) -> &Quaternion {
        &self.0
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;
    fn neg(self) -> UnitQuaternion {
        UnitQuaternion(-self.0)
    }
}

impl From<UnitQuaternion> for Quaternion {
    fn from(u: UnitQuaternion) -> Quaternion {
        u.0
    }
}

impl TryFrom<Quaternion> for UnitQuaternion {
    type Error = Error;
    fn try_from(q: Quaternion) -> Result<Self> {
        UnitQuaternion::try_new(q)
    }
}
