//! Companion control system on real projective space: a rank-one-minus-
//! scalar symmetric drift plus rotation controls acting on the tail
//! coordinates, the symmetric-matrix embedding of projective points, the
//! height dome around the first coordinate axis, and rank verification.
//!
//! States are unit representatives canonicalized so the first coordinate
//! above threshold is positive; every operation is checked to be
//! consistent under v ↦ -v.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::orbits::{ConditionReport, ControlRange, Schedule, VerifyParams};
use crate::tol::{ALGEBRAIC_TOL, INVARIANCE_TOL, PIVOT_TOL};

const SIGN_THRESHOLD: f64 = 1e-12;

/// Point of projective space, stored as a canonicalized unit
/// representative.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjPoint {
    v: Vec<f64>,
}

impl ProjPoint {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let mut v = DVector::from_column_slice(coords);
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::DegeneratePoint { norm });
        }
        v /= norm;
        canonicalize(&mut v);
        Ok(ProjPoint {
            v: v.as_slice().to_vec(),
        })
    }

    pub fn coords(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.v)
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// Chordal distance between lines: min over the sign choice.
    pub fn distance(&self, other: &ProjPoint) -> f64 {
        proj_distance(&self.coords(), &other.coords())
    }
}

fn canonicalize(v: &mut DVector<f64>) {
    for &c in v.iter() {
        if c.abs() > SIGN_THRESHOLD {
            if c < 0.0 {
                *v = -v.clone();
            }
            return;
        }
    }
}

fn proj_distance(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let plus = (a + b).norm();
    let minus = (a - b).norm();
    plus.min(minus)
}

/// Linear system on projective space: symmetric traceless drift matrix and
/// skew rotation controls confined to the tail block.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjSystem {
    pub n: usize,
    pub drift: DMatrix<f64>,
    pub controls: Vec<DMatrix<f64>>,
    pub range: ControlRange,
}

impl ProjSystem {
    pub fn new(
        n: usize,
        drift: DMatrix<f64>,
        controls: Vec<DMatrix<f64>>,
        range: ControlRange,
    ) -> Result<Self> {
        let system = ProjSystem {
            n,
            drift,
            controls,
            range,
        };
        system.validate()?;
        Ok(system)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.drift.nrows() != n || self.drift.ncols() != n {
            return Err(Error::InvalidSystem("drift matrix has wrong shape".into()));
        }
        if (&self.drift - self.drift.transpose()).amax() > ALGEBRAIC_TOL
            || self.drift.trace().abs() > ALGEBRAIC_TOL
        {
            return Err(Error::InvalidSystem(
                "drift must be symmetric and traceless".into(),
            ));
        }
        for b in &self.controls {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::InvalidSystem("control matrix has wrong shape".into()));
            }
            if (b + b.transpose()).amax() > ALGEBRAIC_TOL {
                return Err(Error::InvalidSystem("controls must be skew".into()));
            }
            for i in 0..n {
                if b[(0, i)].abs() > ALGEBRAIC_TOL || b[(i, 0)].abs() > ALGEBRAIC_TOL {
                    return Err(Error::InvalidSystem(
                        "controls must vanish on the first row and column".into(),
                    ));
                }
            }
        }
        self.range
            .validate(self.controls.len())
            .map_err(|e| Error::InvalidSystem(e.to_string()))
    }

    pub fn frozen_matrix(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        if !self.range.contains(u, self.controls.len()) {
            return Err(Error::ControlOutOfRange(u.to_vec()));
        }
        let mut m = self.drift.clone();
        for (ui, b) in u.iter().zip(&self.controls) {
            m += b * *ui;
        }
        Ok(m)
    }
}

/// Tangent vector of the projective flow of M at a unit representative:
/// `Mx - ⟨Mx, x⟩x`. The value at -x is the negative, so the flow is
/// well defined on lines.
pub fn induced_field(m: &DMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    let mx = m * x;
    let lambda = mx.dot(x);
    mx - x * lambda
}

/// Lexicographic elementary skew basis of rotations on d coordinates.
fn skew_basis(d: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::with_capacity(d * (d - 1) / 2);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = DMatrix::zeros(d, d);
            m[(j, k)] = 1.0;
            m[(k, j)] = -1.0;
            out.push(m);
        }
    }
    out
}

/// Assembles the example system: v0 = (1/√n, w) with 1/n + |w|² = 1,
/// drift v0 v0ᵗ - Id/n, and one control per elementary tail rotation,
/// with box range [-1, 1]^m.
pub fn build_example(n: usize, w: &[f64]) -> Result<ProjSystem> {
    if n < 3 {
        return Err(Error::InvalidArgument("need n >= 3".into()));
    }
    if w.len() != n - 1 {
        return Err(Error::InvalidArgument(format!(
            "w must have length {}",
            n - 1
        )));
    }
    let w_sqr: f64 = w.iter().map(|c| c * c).sum();
    if ((1.0 / n as f64) + w_sqr - 1.0).abs() > ALGEBRAIC_TOL {
        return Err(Error::InvalidCase(format!(
            "norm condition violated: 1/n + |w|^2 = {}",
            1.0 / n as f64 + w_sqr
        )));
    }
    let mut v0 = DVector::zeros(n);
    v0[0] = (n as f64).sqrt().recip();
    for (i, &c) in w.iter().enumerate() {
        v0[i + 1] = c;
    }
    let drift = &v0 * v0.transpose() - DMatrix::identity(n, n) / (n as f64);
    let controls: Vec<DMatrix<f64>> = skew_basis(n - 1)
        .into_iter()
        .map(|x| {
            let mut b = DMatrix::zeros(n, n);
            b.view_mut((1, 1), (n - 1, n - 1)).copy_from(&x);
            b
        })
        .collect();
    ProjSystem::new(n, drift, controls, ControlRange::Box { lo: -1.0, hi: 1.0 })
}

/// The distinguished point (1/√n, w) of the example system.
pub fn example_anchor(system: &ProjSystem) -> ProjPoint {
    let eig = system.drift.clone().symmetric_eigen();
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] > eig.eigenvalues[best] {
            best = i;
        }
    }
    let v = eig.eigenvectors.column(best).into_owned();
    ProjPoint::new(v.as_slice()).expect("unit eigenvector")
}

/// Symmetric trace-free embedding `v vᵗ - Id/n` of a projective point.
pub fn sym_embed(v: &ProjPoint) -> DMatrix<f64> {
    let x = v.coords();
    let n = v.dim();
    &x * x.transpose() - DMatrix::identity(n, n) / (n as f64)
}

/// Canonical inner product on embedded points: `tr(VW)`, which equals
/// `⟨v,w⟩² - 1/n` on unit representatives.
pub fn sym_inner(v: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
    (v * w).trace()
}

/// Height dome `{[v] : |⟨v, e1⟩| ≥ 1/√n}`. The absolute value reflects
/// the sign identification of representatives.
#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
pub struct ProjDome {
    pub n: usize,
}

pub fn dome_c(n: usize) -> Result<ProjDome> {
    if n < 2 {
        return Err(Error::InvalidArgument("need n >= 2".into()));
    }
    Ok(ProjDome { n })
}

impl ProjDome {
    pub fn level(&self) -> f64 {
        (self.n as f64).sqrt().recip()
    }

    pub fn exit_depth(&self, v: &DVector<f64>) -> f64 {
        self.level() - v[0].abs()
    }

    pub fn contains(&self, v: &DVector<f64>, tol: f64) -> bool {
        self.exit_depth(v) <= tol
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> DVector<f64> {
        let n = self.n;
        let t: f64 = rng.gen();
        let height = self.level() + (1.0 - self.level()) * t * t;
        let mut tail = DVector::zeros(n - 1);
        loop {
            for i in 0..(n - 1) {
                tail[i] = rng.gen_range(-1.0..1.0);
            }
            let norm = tail.norm();
            if norm > 1e-3 {
                tail /= norm;
                break;
            }
        }
        let mut v = DVector::zeros(n);
        v[0] = height;
        let radial = (1.0 - height * height).max(0.0).sqrt();
        for i in 0..(n - 1) {
            v[i + 1] = tail[i] * radial;
        }
        canonicalize(&mut v);
        v
    }

    fn grid(&self, count: usize, seed: u64) -> Vec<DVector<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Vec::with_capacity(count);
        let mut pole = DVector::zeros(self.n);
        pole[0] = 1.0;
        pts.push(pole);
        while pts.len() < count {
            pts.push(self.sample(&mut rng));
        }
        pts.truncate(count);
        pts
    }
}

/// Bracket-closure rank of {drift, controls} inside the traceless
/// matrices; the example system generates everything, rank n² - 1.
pub fn larc_check_example(system: &ProjSystem) -> usize {
    let mut gens = vec![system.drift.clone()];
    gens.extend(system.controls.iter().cloned());
    let max_dim = system.n * system.n - 1;
    linalg::bracket_closure(&gens, max_dim, PIVOT_TOL).0
}

fn rk4_proj_step(m: &DMatrix<f64>, x: &DVector<f64>, h: f64) -> DVector<f64> {
    let eval = |p: &DVector<f64>| {
        let u = p / p.norm();
        induced_field(m, &u)
    };
    let k1 = eval(x);
    let k2 = eval(&(x + &k1 * (h * 0.5)));
    let k3 = eval(&(x + &k2 * (h * 0.5)));
    let k4 = eval(&(x + &k3 * h));
    let mut next = x + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
    next /= next.norm();
    next
}

/// Steps a schedule through the projective flow; the visitor sees raw unit
/// representatives (not canonicalized) so paths stay continuous.
pub fn walk_schedule_proj(
    system: &ProjSystem,
    x0: &DVector<f64>,
    schedule: &[(f64, Vec<f64>)],
    step: f64,
    visit: &mut dyn FnMut(f64, &DVector<f64>) -> bool,
) -> Result<DVector<f64>> {
    let mut x = x0 / x0.norm();
    let mut t = 0.0;
    if !visit(t, &x) {
        return Ok(x);
    }
    for (duration, u) in schedule {
        let m = system.frozen_matrix(u)?;
        if step * 2.0 * m.norm() > 0.5 {
            return Err(Error::InvalidArgument(format!(
                "step {step} too large for a matrix of norm {}",
                m.norm()
            )));
        }
        let end = t + duration;
        while t < end - 1e-15 {
            let h = step.min(end - t);
            x = rk4_proj_step(&m, &x, h);
            t += h;
            if !visit(t, &x) {
                return Ok(x);
            }
        }
        t = end;
    }
    Ok(x)
}

/// Attractor of a frozen control, located by running the flow to
/// stationarity from a generic start. None when no fixed point is reached
/// (e.g. rotation-dominated spectra).
pub fn frozen_attractor(system: &ProjSystem, u: &[f64]) -> Result<Option<ProjPoint>> {
    let m = system.frozen_matrix(u)?;
    let n = system.n;
    let mut x = DVector::from_fn(n, |i, _| 1.0 + 0.37 * (i as f64 + 1.0).sin());
    x /= x.norm();
    let h = 1e-2;
    for _ in 0..6000 {
        x = rk4_proj_step(&m, &x, h);
    }
    if induced_field(&m, &x).norm() < 1e-7 {
        Ok(Some(ProjPoint::new(x.as_slice())?))
    } else {
        Ok(None)
    }
}

/// Verification report for the projective example; mirrors the sphere
/// checks and adds the exact rotation-invariance of the dome height under
/// control-only flows.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjIcsReport {
    pub schema_version: u32,
    pub invariance: ConditionReport,
    pub reachability: ConditionReport,
    pub attraction: ConditionReport,
    pub b_flow_invariance: ConditionReport,
}

impl ProjIcsReport {
    pub fn all_passed(&self) -> bool {
        self.invariance.passed
            && self.reachability.passed
            && self.attraction.passed
            && self.b_flow_invariance.passed
    }
}

fn sample_schedule_proj<R: Rng>(system: &ProjSystem, horizon: f64, rng: &mut R) -> Schedule {
    crate::orbits::sample_schedule_for_range(&system.range, system.controls.len(), horizon, rng)
}

/// Runs the dome verification for the example system: sampled invariance,
/// δ-reachability inside the dome, attraction from a global grid, and the
/// height-preservation of control-only flows.
pub fn verify_example_ics(system: &ProjSystem, params: &VerifyParams) -> Result<ProjIcsReport> {
    system.validate()?;
    let dome = dome_c(system.n)?;
    let anchor = example_anchor(system);

    // (a) invariance of the dome under sampled schedules.
    let worst_violation = (0..params.invariance_trials)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(0x300_000 + idx as u64);
            let start = dome.sample(&mut rng);
            let schedule = sample_schedule_proj(system, params.horizon, &mut rng);
            let mut depth = f64::NEG_INFINITY;
            walk_schedule_proj(system, &start, &schedule, params.sim.step, &mut |_t, x| {
                depth = depth.max(dome.exit_depth(x));
                true
            })
            .map(|_| depth)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let invariance = ConditionReport {
        passed: worst_violation <= INVARIANCE_TOL,
        metric: worst_violation,
        detail: format!(
            "worst dome exit depth {worst_violation:.3e} over {} trials",
            params.invariance_trials
        ),
    };

    // (b) approximate reachability between dome grid points.
    let grid = dome.grid(params.grid, params.seed ^ 0x5eed);
    let clouds: Vec<Vec<DVector<f64>>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut points = Vec::new();
            for s in 0..params.samples {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(1000 + i as u64));
                rng.set_stream(s as u64 + 1);
                let schedule = sample_schedule_proj(system, params.horizon, &mut rng);
                let mut ordinal = 0usize;
                walk_schedule_proj(system, x, &schedule, params.sim.step, &mut |_t, p| {
                    if ordinal.is_multiple_of(params.sim.record_stride) {
                        points.push(p.clone());
                    }
                    ordinal += 1;
                    true
                })
                .map(|end| points.push(end))?;
            }
            Ok(points)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst_gap: f64 = 0.0;
    let mut failed_pairs = 0usize;
    let mut total_pairs = 0usize;
    for (i, cloud) in clouds.iter().enumerate() {
        for (j, y) in grid.iter().enumerate() {
            if i == j {
                continue;
            }
            total_pairs += 1;
            let gap = cloud
                .iter()
                .map(|p| proj_distance(p, y))
                .fold(f64::INFINITY, f64::min);
            worst_gap = worst_gap.max(gap);
            if gap > params.delta {
                failed_pairs += 1;
            }
        }
    }
    let reachability = ConditionReport {
        passed: failed_pairs == 0,
        metric: worst_gap,
        detail: format!(
            "{failed_pairs}/{total_pairs} dome pairs unreachable at delta {:.2e}; worst gap {worst_gap:.3e}",
            params.delta
        ),
    };

    // (c) attraction from a global grid, away from the drift's repeller
    // hyperplane where convergence stalls.
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0xa77ac7);
    let mut starts: Vec<DVector<f64>> = Vec::with_capacity(params.attraction_grid);
    let anchor_coords = anchor.coords();
    while starts.len() < params.attraction_grid {
        let mut v = DVector::from_fn(system.n, |_, _| rng.gen_range(-1.0..1.0f64));
        let norm = v.norm();
        if !(1e-3..=1.0).contains(&norm) {
            continue;
        }
        v /= norm;
        if v.dot(&anchor_coords).abs() < params.repeller_exclusion {
            continue;
        }
        starts.push(v);
    }
    let failed_attraction: usize = starts
        .par_iter()
        .enumerate()
        .map(|(i, start)| {
            let mut entered = false;
            for attempt in 0..params.attraction_schedules {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
                rng.set_stream(0x400_000 + (i * params.attraction_schedules + attempt) as u64);
                let schedule = sample_schedule_proj(system, params.horizon, &mut rng);
                walk_schedule_proj(system, start, &schedule, params.sim.step, &mut |_t, x| {
                    if dome.contains(x, params.enter_tol) {
                        entered = true;
                        return false;
                    }
                    true
                })?;
                if entered {
                    break;
                }
            }
            Ok(usize::from(!entered))
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum();
    let attraction = ConditionReport {
        passed: failed_attraction == 0,
        metric: 1.0 - failed_attraction as f64 / starts.len().max(1) as f64,
        detail: format!(
            "{failed_attraction} of {} global starts never entered the dome",
            starts.len()
        ),
    };

    // (d) control-only flows rotate the tail block and preserve the height
    // exactly.
    let mut worst_height_drift: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0xb0f10);
    for _ in 0..20 {
        let mut v = DVector::from_fn(system.n, |_, _| rng.gen_range(-1.0..1.0f64));
        v /= v.norm();
        let u = system.range.sample(system.controls.len(), &mut rng);
        let mut rotation_only = DMatrix::zeros(system.n, system.n);
        for (ui, b) in u.iter().zip(&system.controls) {
            rotation_only += b * *ui;
        }
        let h0 = v[0];
        let mut x = v.clone();
        let steps = (5.0 / 1e-3) as usize;
        for _ in 0..steps {
            x = rk4_proj_step(&rotation_only, &x, 1e-3);
        }
        worst_height_drift = worst_height_drift.max((x[0] - h0).abs());
    }
    let b_flow_invariance = ConditionReport {
        passed: worst_height_drift <= 1e-9,
        metric: worst_height_drift,
        detail: format!(
            "max height drift {worst_height_drift:.3e} under control-only flows (tolerance 1e-9)"
        ),
    };

    Ok(ProjIcsReport {
        schema_version: 1,
        invariance,
        reachability,
        attraction,
        b_flow_invariance,
    })
}
