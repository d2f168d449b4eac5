//! Command-line front end: simulation, attractor sweeps, reachability
//! clouds, invariant-set verification, Lie-algebra rank checks, the
//! projective example, and the bundled case studies.
//!
//! Inputs marked as JSON accept either an inline JSON string or a path to
//! a JSON file. All sampled subcommands are deterministic in --seed;
//! GEOCTL_THREADS caps the worker pool.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use geoctl::cases::{self, CaseId, CaseParams};
use geoctl::convex::SphericalRegion;
use geoctl::fields::FieldSpec;
use geoctl::flow;
use geoctl::lie::{embed_symmetric, larc_closure, So14Matrix};
use geoctl::orbits::{
    attractor_sweep, sample_positive_orbit, verify_ics, ControlRange, ControlSystem, IcsCandidate,
    SimParams, VerifyParams,
};
use geoctl::projective;
use geoctl::quaternion::{PureQuaternion, Quaternion, UnitQuaternion};

#[derive(Parser)]
#[command(
    name = "geoctl",
    version,
    about = "Quaternionic control systems on the 3-sphere: flows, reachability, invariant control sets"
)]
struct Cli {
    /// Seed for all sampled subcommands.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Region-membership tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Directory for emitted artifacts.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Print machine-readable JSON reports on stdout.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate one induced field and write a t,w,x,y,z CSV trajectory.
    Simulate {
        /// Field as JSON `{"q":[w,x,y,z],"z":[x,y,z],"w":[x,y,z]}`.
        #[arg(long)]
        field: String,
        /// Start point as JSON `[w,x,y,z]`; normalized onto the sphere.
        #[arg(long)]
        x0: String,
        #[arg(long, default_value_t = flow::DEFAULT_T_FINAL)]
        t: f64,
        #[arg(long, default_value_t = flow::DEFAULT_STEP)]
        h: f64,
        /// Output CSV path (defaults to <out-dir>/trajectory.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep frozen-control attractors over a control grid.
    Attractors {
        /// Control system as JSON {"drift":…,"controls":[…],"range":…}.
        #[arg(long)]
        system: String,
        /// Number of grid controls (finite ranges always use all values).
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the positive orbit of a point into a w,x,y,z CSV cloud.
    Reachable {
        #[arg(long)]
        system: String,
        #[arg(long)]
        x0: String,
        #[arg(long, default_value_t = 20.0)]
        horizon: f64,
        #[arg(long, default_value_t = 400)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the invariant-control-set conditions for a candidate region.
    VerifyIcs {
        #[arg(long)]
        system: String,
        /// Candidate region as tagged JSON (dome / segment / hull).
        #[arg(long)]
        candidate: String,
        #[arg(long, default_value_t = 10)]
        grid: usize,
        #[arg(long, default_value_t = 20.0)]
        horizon: f64,
        #[arg(long, default_value_t = 400)]
        samples: usize,
        #[arg(long, default_value_t = 300)]
        trials: usize,
    },
    /// Rank and spanning set of the Lie algebra generated by elements.
    Larc {
        /// JSON array of generators: 25 reals (row-major matrix) or
        /// 4 reals (quaternion embedded as a symmetric element).
        #[arg(long)]
        generators: String,
    },
    /// Build and verify the projective example system.
    ExamplePn {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Tail vector w as a JSON array of n-1 reals with 1/n + |w|² = 1.
        #[arg(long)]
        w: Option<String>,
        #[arg(long, default_value_t = 15.0)]
        horizon: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Run a bundled case study and export report.json plus CSV artifacts.
    Case {
        /// One of: i, i_prime, ii, ii_prime, iii.
        #[arg(long)]
        id: String,
        /// Control direction override for cases i / i_prime (JSON `[x,y,z]`).
        #[arg(long)]
        z: Option<String>,
        #[arg(long)]
        z1: Option<String>,
        #[arg(long)]
        z2: Option<String>,
        #[arg(long, default_value_t = 20.0)]
        horizon: f64,
        #[arg(long, default_value_t = 600)]
        samples: usize,
        #[arg(long, default_value_t = 10)]
        grid: usize,
        #[arg(long, default_value_t = 300)]
        trials: usize,
    },
}

/// Inline JSON or a path to a JSON file.
fn json_arg<T: DeserializeOwned>(raw: &str) -> Result<T> {
    let trimmed = raw.trim();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        serde_json::from_str(trimmed).context("parsing inline JSON")
    } else {
        let body = std::fs::read_to_string(trimmed)
            .with_context(|| format!("reading JSON file '{trimmed}'"))?;
        serde_json::from_str(&body).with_context(|| format!("parsing JSON file '{trimmed}'"))
    }
}

fn parse_point(raw: &str) -> Result<UnitQuaternion> {
    let q: Quaternion = json_arg(raw)?;
    q.project_to_sphere()
        .context("start point cannot be normalized")
}

fn parse_system(raw: &str) -> Result<ControlSystem> {
    let system: ControlSystem = json_arg(raw)?;
    system.validate()?;
    Ok(system)
}

fn init_threads() {
    if let Ok(value) = std::env::var("GEOCTL_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn print_condition(name: &str, c: &geoctl::orbits::ConditionReport) {
    let verdict = if c.passed { "PASS" } else { "FAIL" };
    println!("{name}: {verdict} ({})", c.detail);
}

fn control_grid_for(range: &ControlRange, m: usize, grid: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::SeedableRng;
    match range {
        ControlRange::Finite { values } => values.clone(),
        ControlRange::Box { lo, hi } if m == 1 => {
            let n = grid.max(2);
            (0..n)
                .map(|k| vec![lo + (hi - lo) * k as f64 / (n - 1) as f64])
                .collect()
        }
        range => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..grid.max(1))
                .map(|_| range.sample(m, &mut rng))
                .collect()
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let tol = cli.tol.unwrap_or(1e-9);
    match cli.command {
        Cmd::Simulate { field, x0, t, h, out } => {
            let spec: FieldSpec = json_arg(&field)?;
            let start = parse_point(&x0)?;
            let traj = flow::integrate(&spec, &start, t, h)?;
            let path = out.unwrap_or_else(|| cli.out_dir.join("trajectory.csv"));
            cases::write_trajectory_csv(&path, &traj)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "points": traj.len(),
                        "endpoint": traj.endpoint().as_array(),
                        "norm_drift": traj.max_norm_drift(),
                        "csv": path,
                    })
                );
            } else {
                println!(
                    "integrated {} steps to t={t}; endpoint {:?}; wrote {}",
                    traj.len() - 1,
                    traj.endpoint().as_array(),
                    path.display()
                );
            }
            Ok(true)
        }
        Cmd::Attractors { system, grid, out } => {
            let system = parse_system(&system)?;
            let controls = control_grid_for(&system.range, system.dim(), grid, cli.seed);
            let sweep = attractor_sweep(&system, &controls)?;
            let points: Vec<UnitQuaternion> = sweep.attractors.iter().map(|s| s.point).collect();
            let path = out.unwrap_or_else(|| cli.out_dir.join("attractors.csv"));
            cases::write_points_csv(&path, &points)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "attractors": points.len(),
                        "degenerate_controls": sweep.degenerate.len(),
                        "csv": path,
                    })
                );
            } else {
                println!(
                    "{} attractors ({} degenerate controls skipped); wrote {}",
                    points.len(),
                    sweep.degenerate.len(),
                    path.display()
                );
            }
            Ok(true)
        }
        Cmd::Reachable {
            system,
            x0,
            horizon,
            samples,
            out,
        } => {
            let system = parse_system(&system)?;
            let start = parse_point(&x0)?;
            let cloud = sample_positive_orbit(
                &system,
                &start,
                horizon,
                samples,
                cli.seed,
                &SimParams::default(),
            )?;
            cases::write_points_csv(&out, &cloud.points)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "points": cloud.points.len(),
                        "schedules": cloud.schedules.len(),
                        "csv": out,
                    })
                );
            } else {
                println!(
                    "sampled {} points from {} schedules; wrote {}",
                    cloud.points.len(),
                    cloud.schedules.len(),
                    out.display()
                );
            }
            Ok(true)
        }
        Cmd::VerifyIcs {
            system,
            candidate,
            grid,
            horizon,
            samples,
            trials,
        } => {
            let system = parse_system(&system)?;
            let region: SphericalRegion = json_arg(&candidate)?;
            region.validate()?;
            let candidate = IcsCandidate::new(region, Vec::new())?;
            let params = VerifyParams {
                grid,
                horizon,
                samples,
                seed: cli.seed,
                invariance_trials: trials,
                enter_tol: tol.max(1e-3),
                ..VerifyParams::default()
            };
            let report = verify_ics(&system, &candidate, &params)?;
            // This subcommand's contract is a machine-readable report.
            println!("{}", serde_json::to_string_pretty(&report)?);
            if !cli.json {
                print_condition("invariance", &report.invariance);
                print_condition("reachability", &report.reachability);
                print_condition("attraction", &report.attraction);
            }
            Ok(report.all_passed())
        }
        Cmd::Larc { generators } => {
            let raw: Vec<Vec<f64>> = json_arg(&generators)?;
            if raw.is_empty() {
                bail!("need at least one generator");
            }
            let mut gens: Vec<So14Matrix> = Vec::with_capacity(raw.len());
            for (i, entry) in raw.iter().enumerate() {
                match entry.len() {
                    25 => gens.push(So14Matrix::from_row_major(entry)?),
                    4 => gens.push(embed_symmetric(Quaternion::new(
                        entry[0], entry[1], entry[2], entry[3],
                    ))),
                    other => bail!("generator {i} has {other} entries; expected 25 or 4"),
                }
            }
            let (rank, basis) = larc_closure(&gens)?;
            if cli.json {
                let basis_rows: Vec<Vec<f64>> = basis.iter().map(|m| m.to_row_major()).collect();
                println!(
                    "{}",
                    serde_json::json!({ "rank": rank, "full": rank == 10, "basis": basis_rows })
                );
            } else {
                println!("rank {rank} (full algebra: {})", rank == 10);
                for (i, m) in basis.iter().enumerate() {
                    println!("basis[{i}] = {:?}", m.to_row_major());
                }
            }
            Ok(true)
        }
        Cmd::ExamplePn {
            n,
            w,
            horizon,
            samples,
        } => {
            let w_vec: Vec<f64> = match w {
                Some(raw) => json_arg(&raw)?,
                None => {
                    // Default tail: all weight on the first coordinate.
                    let mut v = vec![0.0; n - 1];
                    v[0] = (1.0 - 1.0 / n as f64).sqrt();
                    v
                }
            };
            let system = projective::build_example(n, &w_vec)?;
            let rank = projective::larc_check_example(&system);
            let params = VerifyParams {
                horizon,
                samples,
                seed: cli.seed,
                grid: 8,
                invariance_trials: 200,
                attraction_grid: 16,
                ..VerifyParams::default()
            };
            let report = projective::verify_example_ics(&system, &params)?;

            // Frozen-control attractors over a seeded control grid.
            let grid = control_grid_for(&system.range, system.controls.len(), 64, cli.seed);
            let mut sweep_rows = Vec::new();
            for u in &grid {
                if let Some(p) = projective::frozen_attractor(&system, u)? {
                    sweep_rows.push(p);
                }
            }
            std::fs::create_dir_all(&cli.out_dir)?;
            let sweep_path = cli.out_dir.join("example-attractors.csv");
            let mut body = String::new();
            let header: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            body.push_str(&header.join(","));
            body.push('\n');
            for p in &sweep_rows {
                let coords = p.coords();
                let row: Vec<String> = coords.iter().map(|c| format!("{c}")).collect();
                body.push_str(&row.join(","));
                body.push('\n');
            }
            std::fs::write(&sweep_path, body)?;

            let report_path = cli.out_dir.join("example-report.json");
            let payload = serde_json::json!({
                "schema_version": 1,
                "n": n,
                "w": w_vec,
                "larc_rank": rank,
                "larc_full": rank == n * n - 1,
                "report": report,
            });
            std::fs::write(&report_path, format!("{:#}\n", payload))?;

            if cli.json {
                println!("{payload:#}");
            } else {
                println!("larc rank {rank} (full: {})", rank == n * n - 1);
                print_condition("invariance", &report.invariance);
                print_condition("reachability", &report.reachability);
                print_condition("attraction", &report.attraction);
                print_condition("rotation-invariance", &report.b_flow_invariance);
                println!(
                    "wrote {} and {}",
                    report_path.display(),
                    sweep_path.display()
                );
            }
            Ok(report.all_passed())
        }
        Cmd::Case {
            id,
            z,
            z1,
            z2,
            horizon,
            samples,
            grid,
            trials,
        } => {
            let id = CaseId::parse(&id)?;
            let mut params = CaseParams::default();
            if let Some(raw) = z {
                params.z = json_arg::<PureQuaternion>(&raw)?;
            }
            if let Some(raw) = z1 {
                params.z1 = json_arg::<PureQuaternion>(&raw)?;
            }
            if let Some(raw) = z2 {
                params.z2 = json_arg::<PureQuaternion>(&raw)?;
            }
            params.verify = VerifyParams {
                grid,
                horizon,
                samples,
                seed: cli.seed,
                invariance_trials: trials,
                ..VerifyParams::default()
            };
            let (report, artifacts) = cases::run_case(id, &params)?;
            let written = cases::export(&report, &artifacts, &cli.out_dir)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("case {id}");
                print_condition("invariance", &report.ics.invariance);
                print_condition("reachability", &report.ics.reachability);
                print_condition("attraction", &report.ics.attraction);
                for path in &written {
                    println!("wrote {}", path.display());
                }
            }
            Ok(report.all_passed())
        }
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
