//! Numerical integration of induced fields on S³: classical RK4 in ℝ⁴ with
//! projection back to the sphere after every step, concatenation under
//! piecewise-constant controls, and a planarity check for trajectories
//! that should follow great circles.
//!
//! Starting exactly at a repeller is not an error: the point is singular,
//! so the trajectory stays fixed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FieldSpec;
use crate::orbits::ControlSystem;
use crate::quaternion::{Quaternion, UnitQuaternion};

/// Default step size for single-field integration.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Default horizon for convergence runs; contraction rates near the
/// attractors of unit-size fields are O(1), so this is ample.
pub const DEFAULT_T_FINAL: f64 = 20.0;

/// One constant-control interval of a trajectory log.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ControlSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub u: Vec<f64>,
}

/// Sampled integral curve: strictly increasing times, matching points, and
/// the piecewise-constant control that generated it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<UnitQuaternion>,
    pub control_log: Vec<ControlSegment>,
}

impl Trajectory {
    pub fn endpoint(&self) -> UnitQuaternion {
        *self.points.last().expect("trajectory has at least one point")
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest deviation of any point from the unit sphere.
    pub fn max_norm_drift(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn eval_projected(field: &FieldSpec, x: Quaternion) -> Quaternion {
    let u = x
        .project_to_sphere()
        .expect("integration stage stays near the sphere");
    field.evaluate(&u)
}

/// One RK4 step followed by re-projection to S³.
pub fn rk4_step(field: &FieldSpec, x: &UnitQuaternion, h: f64) -> UnitQuaternion {
    let x0 = **x;
    let k1 = field.evaluate(x);
    let k2 = eval_projected(field, x0 + k1 * (h * 0.5));
    let k3 = eval_projected(field, x0 + k2 * (h * 0.5));
    let k4 = eval_projected(field, x0 + k3 * h);
    (x0 + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0))
        .project_to_sphere()
        .expect("step stays near the sphere")
}

/// Steps of this fraction of the field's speed bound keep every RK4 stage
/// safely away from the origin.
fn check_step(h: f64, field: &FieldSpec) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("need h > 0".into()));
    }
    if h * field.speed_bound() > 0.5 {
        return Err(Error::InvalidArgument(format!(
            "step {h} too large for a field with speed bound {}",
            field.speed_bound()
        )));
    }
    Ok(())
}

/// Integrates a single field, recording every step.
pub fn integrate(spec: &FieldSpec, x0: &UnitQuaternion, t_final: f64, h: f64) -> Result<Trajectory> {
    check_step(h, spec)?;
    if !(t_final >= 0.0) {
        return Err(Error::InvalidArgument("need t_final >= 0".into()));
    }
    let mut times = vec![0.0];
    let mut points = vec![*x0];
    let mut t = 0.0;
    let mut x = *x0;
    while t < t_final - 1e-15 {
        let step = h.min(t_final - t);
        x = rk4_step(spec, &x, step);
        t += step;
        times.push(t);
        points.push(x);
    }
    Ok(Trajectory {
        times,
        points,
        control_log: vec![ControlSegment {
            t_start: 0.0,
            t_end: t_final,
            u: Vec::new(),
        }],
    })
}

/// Concatenates frozen-field trajectories over a piecewise-constant
/// schedule of (duration, control) pairs. Continuity at switch times is
/// exact by construction; the control value at a switch time is the new
/// one.
pub fn integrate_switched(
    system: &ControlSystem,
    x0: &UnitQuaternion,
    schedule: &[(f64, Vec<f64>)],
    h: f64,
) -> Result<Trajectory> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("need h > 0".into()));
    }
    let mut times = vec![0.0];
    let mut points = vec![*x0];
    let mut control_log = Vec::with_capacity(schedule.len());
    let mut t = 0.0;
    let mut x = *x0;
    for (duration, u) in schedule {
        if !(*duration > 0.0) {
            return Err(Error::InvalidArgument("durations must be positive".into()));
        }
        let field = system.frozen_field(u)?;
        check_step(h, &field)?;
        let t_start = t;
        let segment_end = t + duration;
        while t < segment_end - 1e-15 {
            let step = h.min(segment_end - t);
            x = rk4_step(&field, &x, step);
            t += step;
            times.push(t);
            points.push(x);
        }
        t = segment_end;
        control_log.push(ControlSegment {
            t_start,
            t_end: segment_end,
            u: u.clone(),
        });
    }
    Ok(Trajectory {
        times,
        points,
        control_log,
    })
}

/// Fits the best 2-plane through the origin to the trajectory (top-two
/// right singular subspace of the point matrix) and returns the largest
/// distance of any point from it. Symmetric-field trajectories follow
/// great circles, so their deviation is bounded by integration error.
pub fn great_circle_test(traj: &Trajectory) -> f64 {
    let pts = &traj.points;
    if pts.len() < 3 {
        return 0.0;
    }
    let spread = pts
        .iter()
        .map(|p| p.distance(&pts[0]))
        .fold(0.0, f64::max);
    if spread < 1e-12 {
        // Constant trajectory: any plane through the point works.
        return 0.0;
    }
    // Top-two eigenvectors of the 4x4 second-moment matrix span the
    // best-fit plane (the top right-singular subspace of the point matrix).
    let mut gram = nalgebra::Matrix4::<f64>::zeros();
    for p in pts {
        let v = nalgebra::Vector4::from_column_slice(&p.as_array());
        gram += v * v.transpose();
    }
    let eigen = gram.symmetric_eigen();
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .partial_cmp(&eigen.eigenvalues[a])
            .unwrap()
    });
    let e1 = eigen.eigenvectors.column(order[0]).into_owned();
    let e2 = eigen.eigenvectors.column(order[1]).into_owned();
    let mut worst: f64 = 0.0;
    for p in pts {
        let v = nalgebra::Vector4::from_column_slice(&p.as_array());
        let residual = v - e1 * e1.dot(&v) - e2 * e2.dot(&v);
        worst = worst.max(residual.norm());
    }
    worst
}
