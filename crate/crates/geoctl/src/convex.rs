//! Spherical convexity on S³ through cones: domes, minimal geodesic
//! segments, and conic hulls of finitely many generators. A nonempty
//! subset of the sphere is convex exactly when its cone is convex and
//! pointed, so hull membership reduces to a nonnegative least-squares
//! feasibility problem over the generators.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::nnls;
use crate::quaternion::{PureQuaternion, Quaternion, UnitQuaternion};

/// Candidate invariant region, represented by its generating cone.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SphericalRegion {
    /// `{p : ⟨p, axis⟩ ≥ level}` with level in `[0, 1)`.
    Dome { axis: UnitQuaternion, level: f64 },
    /// Minimal great-circle arc between two non-antipodal points.
    Segment { p1: UnitQuaternion, p2: UnitQuaternion },
    /// Trace on the sphere of the pointed cone spanned by the generators.
    Hull { generators: Vec<UnitQuaternion> },
}

impl SphericalRegion {
    pub fn dome(axis: UnitQuaternion, level: f64) -> Result<Self> {
        let region = SphericalRegion::Dome { axis, level };
        region.validate()?;
        Ok(region)
    }

    pub fn segment(p1: UnitQuaternion, p2: UnitQuaternion) -> Result<Self> {
        let region = SphericalRegion::Segment { p1, p2 };
        region.validate()?;
        Ok(region)
    }

    pub fn hull(generators: Vec<UnitQuaternion>) -> Result<Self> {
        let region = SphericalRegion::Hull { generators };
        region.validate()?;
        Ok(region)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SphericalRegion::Dome { level, .. } => {
                if !(0.0..1.0).contains(level) {
                    return Err(Error::InvalidRegion(format!(
                        "dome level {level} outside [0, 1)"
                    )));
                }
            }
            SphericalRegion::Segment { p1, p2 } => {
                if (**p1 + **p2).norm() < 1e-9 {
                    return Err(Error::AntipodalEndpoints);
                }
            }
            SphericalRegion::Hull { generators } => {
                if generators.is_empty() {
                    return Err(Error::InvalidRegion("hull needs generators".into()));
                }
                if !is_pointed(generators) {
                    return Err(Error::InvalidRegion(
                        "generating cone contains a line".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Signed distance-like exit depth: positive outside the region, at
    /// most zero inside. Domes measure the height shortfall, segments and
    /// hulls the distance to the arc resp. cone.
    pub fn exit_depth(&self, p: &UnitQuaternion) -> f64 {
        match self {
            SphericalRegion::Dome { axis, level } => level - p.dot(axis),
            SphericalRegion::Segment { p1, p2 } => {
                let (n, theta_max) = match arc_frame(p1, p2) {
                    Some(f) => f,
                    None => return p.distance(p1),
                };
                let a = p.dot(p1);
                let b = p.dot(&n);
                let theta = b.atan2(a).clamp(0.0, theta_max);
                let nearest = **p1 * theta.cos() + n * theta.sin();
                (**p - nearest).norm()
            }
            SphericalRegion::Hull { generators } => {
                let (_, residual) = cone_projection(generators, p);
                residual
            }
        }
    }

    pub fn contains(&self, p: &UnitQuaternion, tol: f64) -> bool {
        self.exit_depth(p) <= tol
    }

    /// Random point of the region. Domes mix boundary-biased and interior
    /// draws, segments are uniform in angle, hulls use normalized positive
    /// combinations.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> UnitQuaternion {
        match self {
            SphericalRegion::Dome { axis, level } => {
                let t: f64 = rng.gen::<f64>();
                let height = level + (1.0 - level) * t * t;
                let dir = random_unit3(rng);
                let radial = (1.0 - height * height).max(0.0).sqrt();
                let im = dir * radial;
                rotate_from_pole(axis, height, im)
            }
            SphericalRegion::Segment { p1, p2 } => {
                let (n, theta_max) = match arc_frame(p1, p2) {
                    Some(f) => f,
                    None => return *p1,
                };
                let theta = rng.gen::<f64>() * theta_max;
                (**p1 * theta.cos() + n * theta.sin())
                    .project_to_sphere()
                    .expect("arc point")
            }
            SphericalRegion::Hull { generators } => {
                let mut acc = Quaternion::ZERO;
                for g in generators {
                    let a: f64 = -rng.gen::<f64>().max(1e-12).ln();
                    acc = acc + **g * a;
                }
                acc.project_to_sphere().unwrap_or(generators[0])
            }
        }
    }

    /// Deterministic point set covering the region: extreme points first,
    /// then seeded samples.
    pub fn grid(&self, n: usize, seed: u64) -> Vec<UnitQuaternion> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Vec::with_capacity(n);
        match self {
            SphericalRegion::Dome { axis, .. } => pts.push(*axis),
            SphericalRegion::Segment { p1, p2 } => {
                if n == 1 {
                    pts.push(*p1);
                } else if let Some((nv, theta_max)) = arc_frame(p1, p2) {
                    for k in 0..n {
                        let theta = theta_max * (k as f64) / ((n - 1) as f64);
                        let p = (**p1 * theta.cos() + nv * theta.sin())
                            .project_to_sphere()
                            .expect("arc point");
                        pts.push(p);
                    }
                    pts[0] = *p1;
                    pts[n - 1] = *p2;
                } else {
                    pts.push(*p1);
                }
                return pts;
            }
            SphericalRegion::Hull { generators } => pts.extend(generators.iter().copied()),
        }
        while pts.len() < n {
            pts.push(self.sample(&mut rng));
        }
        pts.truncate(n);
        pts
    }

    /// Sampled outline of the region for export: the dome boundary sphere,
    /// the arc itself for segments, or the generator-to-generator arcs for
    /// hulls.
    pub fn boundary_sample(&self, n: usize) -> Vec<UnitQuaternion> {
        match self {
            SphericalRegion::Dome { axis, level } => {
                let radial = (1.0 - level * level).max(0.0).sqrt();
                fibonacci_sphere(n)
                    .into_iter()
                    .map(|dir| rotate_from_pole(axis, *level, dir * radial))
                    .collect()
            }
            SphericalRegion::Segment { p1, p2 } => {
                geodesic_segment_points(p1, p2, n.max(2)).unwrap_or_else(|_| vec![*p1])
            }
            SphericalRegion::Hull { generators } => {
                if generators.len() == 1 {
                    return vec![generators[0]];
                }
                let per_edge = (n / generators.len()).max(2);
                let mut out = Vec::new();
                for i in 0..generators.len() {
                    let j = (i + 1) % generators.len();
                    if let Ok(arc) = geodesic_segment_points(&generators[i], &generators[j], per_edge)
                    {
                        out.extend(arc);
                    }
                }
                out
            }
        }
    }
}

/// In-plane unit normal at p1 pointing toward p2, plus the arc angle.
/// Returns None when the points coincide.
fn arc_frame(p1: &UnitQuaternion, p2: &UnitQuaternion) -> Option<(Quaternion, f64)> {
    let ortho = **p2 - **p1 * p2.dot(p1);
    let norm = ortho.norm();
    if norm < 1e-12 {
        return None;
    }
    let n = ortho / norm;
    let theta_max = norm.atan2(p2.dot(p1));
    Some((n, theta_max))
}

/// Projection of v onto the conic hull of the generators via nonnegative
/// least squares; returns coefficients and the residual distance.
fn cone_projection(generators: &[UnitQuaternion], v: &Quaternion) -> (DVector<f64>, f64) {
    let mut a = DMatrix::zeros(4, generators.len());
    for (c, g) in generators.iter().enumerate() {
        let arr = g.as_array();
        for r in 0..4 {
            a[(r, c)] = arr[r];
        }
    }
    let b = DVector::from_column_slice(&v.as_array());
    nnls(&a, &b)
}

/// A finitely generated cone is pointed iff zero is not a nontrivial
/// nonnegative combination of the generators. Decided by the feasibility
/// of `Σ aᵢ gᵢ = 0, aᵢ ≥ 0, Σ aᵢ = 1`.
pub fn is_pointed(generators: &[UnitQuaternion]) -> bool {
    if generators.is_empty() {
        return true;
    }
    let mut a = DMatrix::zeros(5, generators.len());
    for (c, g) in generators.iter().enumerate() {
        let arr = g.as_array();
        for r in 0..4 {
            a[(r, c)] = arr[r];
        }
        a[(4, c)] = 1.0;
    }
    let mut b = DVector::zeros(5);
    b[4] = 1.0;
    let (_, residual) = nnls(&a, &b);
    residual >= 1e-9
}

/// n points on the minimal arc from p1 to p2, uniform in angle, endpoints
/// exact.
pub fn geodesic_segment_points(
    p1: &UnitQuaternion,
    p2: &UnitQuaternion,
    n: usize,
) -> Result<Vec<UnitQuaternion>> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 points".into()));
    }
    if (**p1 + **p2).norm() < 1e-9 {
        return Err(Error::AntipodalEndpoints);
    }
    let Some((nv, theta_max)) = arc_frame(p1, p2) else {
        return Ok(vec![*p1; n]);
    };
    let mut out = Vec::with_capacity(n);
    out.push(*p1);
    for k in 1..(n - 1) {
        let theta = theta_max * (k as f64) / ((n - 1) as f64);
        out.push(
            (**p1 * theta.cos() + nv * theta.sin())
                .project_to_sphere()
                .expect("arc point"),
        );
    }
    out.push(*p2);
    Ok(out)
}

/// Critical dome level `1/√(1+|z|²)`: domes strictly below it are
/// invariant under the pair of fields with symmetric parts 1 ± z, and
/// boundary-aligned counterexamples exist above it.
pub fn dome_invariance_threshold(z: PureQuaternion) -> f64 {
    1.0 / (1.0 + z.norm_sqr()).sqrt()
}

/// Angle-dependent critical level `1/√(1+|z|²cos²t)`; minimized at
/// alignment, where it equals [`dome_invariance_threshold`].
pub fn r_t(z: PureQuaternion, t: f64) -> f64 {
    let c = t.cos();
    1.0 / (1.0 + z.norm_sqr() * c * c).sqrt()
}

fn random_unit3<R: Rng>(rng: &mut R) -> PureQuaternion {
    loop {
        let v = PureQuaternion::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v * (1.0 / n);
        }
    }
}

/// Deterministic near-uniform directions on the unit 2-sphere.
fn fibonacci_sphere(n: usize) -> Vec<PureQuaternion> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n.max(1))
        .map(|i| {
            let y = 1.0 - 2.0 * ((i as f64) + 0.5) / (n.max(1) as f64);
            let r = (1.0 - y * y).max(0.0).sqrt();
            let phi = golden * (i as f64);
            PureQuaternion::new(r * phi.cos(), y, r * phi.sin())
        })
        .collect()
}

/// Places a scalar/imaginary pair (height, im) defined relative to the
/// pole at `axis`: left-multiplication by the axis maps the pole 1 to the
/// axis isometrically.
fn rotate_from_pole(axis: &UnitQuaternion, height: f64, im: PureQuaternion) -> UnitQuaternion {
    let local = Quaternion::from_parts(height, im);
    (**axis * local)
        .project_to_sphere()
        .expect("unit product")
}
