//! The five bundled case studies on S³, their expected regions in closed
//! form, report generation, and CSV/JSON artifact export.
//!
//! Every case drives the unit-height gradient field with pure-quaternion
//! controls; only the control coupling and range differ:
//!
//! * `i`       one control, u ∈ [-1, 1]      → minimal geodesic segment
//! * `i_prime` one control, u = ±1           → the same segment
//! * `ii`      two controls, `(u,v) ∈ [0,1]²`  → hull of four attractors
//! * `ii_prime` two controls, three values   → hull of three attractors
//! * `iii`     three controls, |u| ≤ 1       → dome Re ≥ 1/√2

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::convex::SphericalRegion;
use crate::error::{Error, Result};
use crate::fields::FieldSpec;
use crate::flow::Trajectory;
use crate::orbits::{
    attractor_sweep, sample_positive_orbit, verify_ics, AttractorSweep, ControlRange,
    ControlSystem, IcsCandidate, IcsReport, ReachCloud, VerifyParams,
};
use crate::quaternion::{PureQuaternion, Quaternion, UnitQuaternion};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    I,
    IPrime,
    Ii,
    IiPrime,
    Iii,
}

impl CaseId {
    pub const ALL: [CaseId; 5] = [CaseId::I, CaseId::IPrime, CaseId::Ii, CaseId::IiPrime, CaseId::Iii];

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" => Ok(CaseId::I),
            "i'" | "i_prime" | "iprime" => Ok(CaseId::IPrime),
            "ii" => Ok(CaseId::Ii),
            "ii'" | "ii_prime" | "iiprime" => Ok(CaseId::IiPrime),
            "iii" => Ok(CaseId::Iii),
            other => Err(Error::InvalidCase(format!("unknown case id '{other}'"))),
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseId::I => "i",
            CaseId::IPrime => "i_prime",
            CaseId::Ii => "ii",
            CaseId::IiPrime => "ii_prime",
            CaseId::Iii => "iii",
        };
        f.write_str(s)
    }
}

/// Overridable case inputs; defaults follow the bundled fixtures.
#[derive(Clone, Debug)]
pub struct CaseParams {
    pub z: PureQuaternion,
    pub z1: PureQuaternion,
    pub z2: PureQuaternion,
    pub verify: VerifyParams,
}

impl Default for CaseParams {
    fn default() -> Self {
        CaseParams {
            z: PureQuaternion::I,
            z1: PureQuaternion::I,
            z2: PureQuaternion::J,
            verify: VerifyParams::default(),
        }
    }
}

/// A case system together with its closed-form expected region.
#[derive(Clone, Debug)]
pub struct CaseStudy {
    pub id: CaseId,
    pub system: ControlSystem,
    pub expected: IcsCandidate,
    /// Control grid used for attractor sweeps and the candidate's
    /// attractor set.
    pub sweep_grid: Vec<Vec<f64>>,
}

fn normalized_shift(z: PureQuaternion, scale: f64) -> Result<UnitQuaternion> {
    Quaternion::from_parts(1.0, z * scale).project_to_sphere()
}

fn drift() -> FieldSpec {
    FieldSpec::symmetric(Quaternion::ONE)
}

fn control(z: PureQuaternion) -> FieldSpec {
    FieldSpec::symmetric(Quaternion::from(z))
}

fn linspace_controls(lo: f64, hi: f64, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| vec![lo + (hi - lo) * k as f64 / (n - 1) as f64])
        .collect()
}

/// Near-uniform directions on the unit 2-sphere of controls.
fn sphere_controls(n: usize, radius: f64) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let y = 1.0 - 2.0 * ((i as f64) + 0.5) / (n as f64);
            let r = (1.0f64 - y * y).max(0.0).sqrt();
            let phi = golden * (i as f64);
            vec![
                radius * r * phi.cos(),
                radius * y,
                radius * r * phi.sin(),
            ]
        })
        .collect()
}

/// Builds the system, expected region, and sweep grid for a case.
pub fn build_case(id: CaseId, params: &CaseParams) -> Result<CaseStudy> {
    match id {
        CaseId::I | CaseId::IPrime => {
            let z = params.z;
            let range = if id == CaseId::I {
                ControlRange::Box { lo: -1.0, hi: 1.0 }
            } else {
                ControlRange::Finite {
                    values: vec![vec![-1.0], vec![1.0]],
                }
            };
            let system = ControlSystem::new(drift(), vec![control(z)], range)?;
            let p1 = normalized_shift(z, 1.0)?;
            let p2 = normalized_shift(z, -1.0)?;
            let region = SphericalRegion::segment(p2, p1)?;
            let sweep_grid = if id == CaseId::I {
                linspace_controls(-1.0, 1.0, 21)
            } else {
                vec![vec![-1.0], vec![1.0]]
            };
            let sweep = attractor_sweep(&system, &sweep_grid)?;
            let expected = IcsCandidate::new(region, sweep.attractors)?;
            Ok(CaseStudy {
                id,
                system,
                expected,
                sweep_grid,
            })
        }
        CaseId::Ii | CaseId::IiPrime => {
            let (z1, z2) = (params.z1, params.z2);
            if z1.cross(&z2).norm() < 1e-9 {
                return Err(Error::InvalidCase(
                    "the two control attractors lie on one great circle with 1".into(),
                ));
            }
            let system = ControlSystem::new(
                drift(),
                vec![control(z1), control(z2)],
                if id == CaseId::Ii {
                    ControlRange::Box { lo: 0.0, hi: 1.0 }
                } else {
                    ControlRange::Finite {
                        values: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
                    }
                },
            )?;
            let p1 = normalized_shift(z1, 1.0)?;
            let p2 = normalized_shift(z2, 1.0)?;
            let (generators, sweep_grid) = if id == CaseId::Ii {
                let p3 = Quaternion::from_parts(1.0, z1 + z2).project_to_sphere()?;
                let mut grid = vec![
                    vec![0.0, 0.0],
                    vec![1.0, 0.0],
                    vec![0.0, 1.0],
                    vec![1.0, 1.0],
                ];
                // Interior attractors must land inside the corner hull.
                for a in [0.25, 0.5, 0.75] {
                    for b in [0.25, 0.5, 0.75] {
                        grid.push(vec![a, b]);
                    }
                }
                (vec![UnitQuaternion::ONE, p1, p2, p3], grid)
            } else {
                (
                    vec![UnitQuaternion::ONE, p1, p2],
                    vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
                )
            };
            let region = SphericalRegion::hull(generators)?;
            let sweep = attractor_sweep(&system, &sweep_grid)?;
            let expected = IcsCandidate::new(region, sweep.attractors)?;
            Ok(CaseStudy {
                id,
                system,
                expected,
                sweep_grid,
            })
        }
        CaseId::Iii => {
            let system = ControlSystem::new(
                drift(),
                vec![
                    control(PureQuaternion::I),
                    control(PureQuaternion::J),
                    control(PureQuaternion::K),
                ],
                ControlRange::Ball { radius: 1.0 },
            )?;
            let region =
                SphericalRegion::dome(UnitQuaternion::ONE, std::f64::consts::FRAC_1_SQRT_2)?;
            let mut sweep_grid = sphere_controls(32, 1.0);
            sweep_grid.extend(sphere_controls(8, 0.5));
            sweep_grid.push(vec![0.0, 0.0, 0.0]);
            let sweep = attractor_sweep(&system, &sweep_grid)?;
            let expected = IcsCandidate::new(region, sweep.attractors)?;
            Ok(CaseStudy {
                id: CaseId::Iii,
                system,
                expected,
                sweep_grid,
            })
        }
    }
}

/// Case verdict plus the inputs that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseReport {
    pub schema_version: u32,
    pub case_id: String,
    pub z: Option<[f64; 3]>,
    pub z1: Option<[f64; 3]>,
    pub z2: Option<[f64; 3]>,
    pub seed: u64,
    pub horizon: f64,
    pub samples: usize,
    pub ics: IcsReport,
}

impl CaseReport {
    pub fn all_passed(&self) -> bool {
        self.ics.all_passed()
    }
}

/// Everything run_case produces beyond the verdict.
#[derive(Clone, Debug)]
pub struct CaseArtifacts {
    pub cloud: ReachCloud,
    pub sweep: AttractorSweep,
    pub boundary: Vec<UnitQuaternion>,
}

/// Builds the case, verifies the expected region, and collects artifacts:
/// a reach cloud from 1, the attractor sweep, and a boundary sample.
pub fn run_case(id: CaseId, params: &CaseParams) -> Result<(CaseReport, CaseArtifacts)> {
    let study = build_case(id, params)?;
    let ics = verify_ics(&study.system, &study.expected, &params.verify)?;
    let cloud = sample_positive_orbit(
        &study.system,
        &UnitQuaternion::ONE,
        params.verify.horizon,
        params.verify.samples,
        params.verify.seed,
        &params.verify.sim,
    )?;
    let sweep = attractor_sweep(&study.system, &study.sweep_grid)?;
    let boundary = study.expected.region.boundary_sample(200);
    let report = CaseReport {
        schema_version: 1,
        case_id: id.to_string(),
        z: matches!(id, CaseId::I | CaseId::IPrime).then(|| params.z.as_array()),
        z1: matches!(id, CaseId::Ii | CaseId::IiPrime).then(|| params.z1.as_array()),
        z2: matches!(id, CaseId::Ii | CaseId::IiPrime).then(|| params.z2.as_array()),
        seed: params.verify.seed,
        horizon: params.verify.horizon,
        samples: params.verify.samples,
        ics,
    };
    Ok((
        report,
        CaseArtifacts {
            cloud,
            sweep,
            boundary,
        },
    ))
}

/// Writes `w,x,y,z` rows. Floats print in shortest round-trip form, so
/// identical inputs give byte-identical files.
pub fn write_points_csv(path: &Path, points: &[UnitQuaternion]) -> Result<()> {
    let mut out = String::from("w,x,y,z\n");
    for p in points {
        let [w, x, y, z] = p.as_array();
        out.push_str(&format!("{w},{x},{y},{z}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes `t,w,x,y,z` rows of a trajectory.
pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut out = String::from("t,w,x,y,z\n");
    for (t, p) in traj.times.iter().zip(&traj.points) {
        let [w, x, y, z] = p.as_array();
        out.push_str(&format!("{t},{w},{x},{y},{z}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes report.json, cloud.csv, attractors.csv and boundary.csv into the
/// directory; returns the written paths.
pub fn export(report: &CaseReport, artifacts: &CaseArtifacts, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let report_path = dir.join("report.json");
    let mut f = fs::File::create(&report_path)?;
    serde_json::to_writer_pretty(&mut f, report)?;
    f.write_all(b"\n")?;
    written.push(report_path);

    let cloud_path = dir.join("cloud.csv");
    write_points_csv(&cloud_path, &artifacts.cloud.points)?;
    written.push(cloud_path);

    let sweep_path = dir.join("attractors.csv");
    let sweep_points: Vec<UnitQuaternion> =
        artifacts.sweep.attractors.iter().map(|s| s.point).collect();
    write_points_csv(&sweep_path, &sweep_points)?;
    written.push(sweep_path);

    let boundary_path = dir.join("boundary.csv");
    write_points_csv(&boundary_path, &artifacts.boundary)?;
    written.push(boundary_path);

    Ok(written)
}
