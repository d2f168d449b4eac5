//! Vector fields induced on S³: a triple (q, z, w) with q ∈ ℍ and
//! z, w ∈ Im ℍ names the field
//!
//! ```text
//! X(x) = (q - x q̄ x)/2 + z·x + x·w
//! ```
//!
//! The symmetric part is the gradient of the height function ⟨q, ·⟩, and
//! z, w act by left resp. right multiplication. Together these span a
//! 10-dimensional Lie algebra matched entrywise to [`crate::lie`].

use std::ops::{Add, Mul};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{embed_symmetric, extract_symmetric, gamma_basis, So14Matrix};
use crate::quaternion::{PureQuaternion, Quaternion, UnitQuaternion};
use crate::tol::{EIGEN_MARGIN, FD_STEP, LINEARIZATION_STEP};

/// Names an induced field by its symmetric, left and right components.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub q: Quaternion,
    pub z: PureQuaternion,
    pub w: PureQuaternion,
}

impl FieldSpec {
    pub const ZERO: FieldSpec = FieldSpec {
        q: Quaternion::ZERO,
        z: PureQuaternion::ZERO,
        w: PureQuaternion::ZERO,
    };

    pub fn new(q: Quaternion, z: PureQuaternion, w: PureQuaternion) -> Self {
        FieldSpec { q, z, w }
    }

    /// Gradient-of-height field (q, 0, 0).
    pub fn symmetric(q: Quaternion) -> Self {
        FieldSpec::new(q, PureQuaternion::ZERO, PureQuaternion::ZERO)
    }

    /// Right-invariant field x ↦ z·x.
    pub fn left_multiplication(z: PureQuaternion) -> Self {
        FieldSpec::new(Quaternion::ZERO, z, PureQuaternion::ZERO)
    }

    /// Left-invariant field x ↦ x·w.
    pub fn right_multiplication(w: PureQuaternion) -> Self {
        FieldSpec::new(Quaternion::ZERO, PureQuaternion::ZERO, w)
    }

    pub fn is_zero(&self) -> bool {
        self.q == Quaternion::ZERO && self.z == PureQuaternion::ZERO && self.w == PureQuaternion::ZERO
    }

    /// Upper bound on |X(x)| over the sphere: |q| + |z| + |w|.
    pub fn speed_bound(&self) -> f64 {
        self.q.norm() + self.z.norm() + self.w.norm()
    }

    /// Tangent vector at x: `(q - x q̄ x)/2 + z x + x w`.
    pub fn evaluate(&self, x: &UnitQuaternion) -> Quaternion {
        let xq = **x;
        let sym = (self.q - xq * self.q.conjugate() * xq) * 0.5;
        sym + Quaternion::from(self.z) * xq + xq * Quaternion::from(self.w)
    }

    /// Right-translated field value `X(p)·p⁻¹`; zero exactly at the
    /// singular points of the field.
    pub fn f_function(&self, p: &UnitQuaternion) -> Quaternion {
        self.evaluate(p) * p.conjugate()
    }

    /// Matrix of the field in so(1,4): symmetric embed plus the left/right
    /// rotation families.
    pub fn to_so14(&self) -> So14Matrix {
        let g = gamma_basis();
        let mut m = embed_symmetric(self.q);
        for (c, gm) in self.z.as_array().iter().zip(&g.left) {
            m = m.add(&gm.scale(*c));
        }
        for (c, gm) in self.w.as_array().iter().zip(&g.right) {
            m = m.add(&gm.scale(*c));
        }
        m
    }

    /// Inverse of [`FieldSpec::to_so14`]. The six rotation-block matrices
    /// are mutually orthogonal with Frobenius norm² = 4, so coefficients
    /// come from plain projections.
    pub fn from_so14(m: &So14Matrix) -> FieldSpec {
        let split = crate::lie::cartan_split(m);
        let q = extract_symmetric(&split.s_part).expect("s_part is symmetric by construction");
        let g = gamma_basis();
        let frob = |a: &So14Matrix, b: &So14Matrix| {
            (a.matrix().transpose() * b.matrix()).trace() / 4.0
        };
        let z = PureQuaternion::new(
            frob(&g.left[0], &split.k_part),
            frob(&g.left[1], &split.k_part),
            frob(&g.left[2], &split.k_part),
        );
        let w = PureQuaternion::new(
            frob(&g.right[0], &split.k_part),
            frob(&g.right[1], &split.k_part),
            frob(&g.right[2], &split.k_part),
        );
        FieldSpec::new(q, z, w)
    }
}

impl Add for FieldSpec {
    type Output = FieldSpec;
    fn add(self, rhs: FieldSpec) -> FieldSpec {
        FieldSpec::new(self.q + rhs.q, self.z + rhs.z, self.w + rhs.w)
    }
}

impl Mul<f64> for FieldSpec {
    type Output = FieldSpec;
    fn mul(self, s: f64) -> FieldSpec {
        FieldSpec::new(self.q * s, self.z * s, self.w * s)
    }
}

/// Gradient of the height function ⟨q, ·⟩ at p: the orthogonal projection
/// `q - ⟨q,p⟩p`. Coincides with the symmetric field on the sphere.
pub fn gradient_height(q: Quaternion, p: &UnitQuaternion) -> Quaternion {
    q - **p * q.dot(p)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityKind {
    Attractor,
    Repeller,
    Other,
}

/// Singular point of a field together with its linearized type.
#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
pub struct Singularity {
    pub point: UnitQuaternion,
    pub kind: SingularityKind,
}

/// Orthonormal tangent frame at p, built by Gram-Schmidt from the standard
/// basis with p removed.
pub fn tangent_frame(p: &UnitQuaternion) -> [Quaternion; 3] {
    let mut frame: Vec<Quaternion> = Vec::with_capacity(3);
    let candidates = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
    for c in candidates {
        let mut v = c - **p * c.dot(p);
        for f in &frame {
            v = v - *f * v.dot(f);
        }
        let n = v.norm();
        if n > 1e-6 {
            frame.push(v / n);
            if frame.len() == 3 {
                break;
            }
        }
    }
    [frame[0], frame[1], frame[2]]
}

/// Field evaluation extended off the sphere by radial projection.
fn evaluate_extended(spec: &FieldSpec, x: Quaternion) -> Quaternion {
    let u = x.project_to_sphere().expect("extension point away from zero");
    spec.evaluate(&u)
}

/// 3×3 matrix of the linearized flow at p in an orthonormal tangent frame,
/// by central differences of the projected field.
pub fn linearize(spec: &FieldSpec, p: &UnitQuaternion) -> Matrix3<f64> {
    let frame = tangent_frame(p);
    let h = LINEARIZATION_STEP;
    let mut m = Matrix3::zeros();
    for (b, eb) in frame.iter().enumerate() {
        let plus = evaluate_extended(spec, **p + *eb * h);
        let minus = evaluate_extended(spec, **p - *eb * h);
        let d = (plus - minus) / (2.0 * h);
        for (a, ea) in frame.iter().enumerate() {
            m[(a, b)] = d.dot(ea);
        }
    }
    m
}

/// Classification goes through the symmetric part of the linearization:
/// exact for gradient fields (their linearizations are symmetric up to
/// differencing noise), and a conservative bound in general since the
/// symmetric part's extreme eigenvalues bracket every real part.
fn classify(spec: &FieldSpec, p: &UnitQuaternion) -> SingularityKind {
    let m = linearize(spec, p);
    let sym = (m + m.transpose()) * 0.5;
    let eigs = sym.symmetric_eigen().eigenvalues;
    if eigs.iter().all(|&e| e < -EIGEN_MARGIN) {
        SingularityKind::Attractor
    } else if eigs.iter().all(|&e| e > EIGEN_MARGIN) {
        SingularityKind::Repeller
    } else {
        SingularityKind::Other
    }
}

/// The two singular points ±q/|q| of the symmetric field (q,0,0), the
/// attractor first. Classification is confirmed by the linearization.
pub fn singularities_symmetric(q: Quaternion) -> Result<(Singularity, Singularity)> {
    if q.norm() == 0.0 {
        return Err(Error::DegenerateField);
    }
    let spec = FieldSpec::symmetric(q);
    let plus = q.project_to_sphere()?;
    let minus = plus.antipode();
    Ok((
        Singularity {
            point: plus,
            kind: classify(&spec, &plus),
        },
        Singularity {
            point: minus,
            kind: classify(&spec, &minus),
        },
    ))
}

/// Lie bracket of two fields by central differences, with the sign
/// convention that makes the spec-to-matrix map a homomorphism:
/// `[X,Y](p) = (DX)(p)·Y(p) - (DY)(p)·X(p)`.
pub fn finite_difference_bracket(
    a: &FieldSpec,
    b: &FieldSpec,
    p: &UnitQuaternion,
) -> Quaternion {
    let h = FD_STEP;
    let jacobian_apply = |spec: &FieldSpec, v: Quaternion| {
        (evaluate_extended(spec, **p + v * h) - evaluate_extended(spec, **p - v * h)) / (2.0 * h)
    };
    let xa = a.evaluate(p);
    let xb = b.evaluate(p);
    jacobian_apply(a, xb) - jacobian_apply(b, xa)
}

/// Compares the finite-difference bracket of the two fields against the
/// field of the matrix commutator; returns the largest deviation over the
/// sample points. The contract for healthy inputs is ≤ 1e-3
/// (finite-difference accuracy).
pub fn field_bracket_check(a: &FieldSpec, b: &FieldSpec, samples: &[UnitQuaternion]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("need at least one sample point".into()));
    }
    let c = FieldSpec::from_so14(&a.to_so14().bracket(&b.to_so14()));
    let mut worst: f64 = 0.0;
    for p in samples {
        let fd = finite_difference_bracket(a, b, p);
        let predicted = c.evaluate(p);
        worst = worst.max((fd - predicted).norm());
    }
    Ok(worst)
}

/// Samples the F-function of the unit-height field along the great circle
/// through 1 and z. The image lies on the straight segment between -z and
/// z, covered twice per revolution.
pub fn f_image_on_great_circle(z: PureQuaternion, n_samples: usize) -> Result<Vec<PureQuaternion>> {
    if (z.norm() - 1.0).abs() > crate::tol::ALGEBRAIC_TOL {
        return Err(Error::NotUnit { norm: z.norm() });
    }
    if n_samples < 3 {
        return Err(Error::InvalidArgument("need at least 3 samples".into()));
    }
    let spec = FieldSpec::symmetric(Quaternion::ONE);
    let mut out = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n_samples as f64);
        let p = Quaternion::from_parts(theta.cos(), z * theta.sin())
            .project_to_sphere()
            .expect("point on the great circle");
        out.push(spec.f_function(&p).im());
    }
    Ok(out)
}
