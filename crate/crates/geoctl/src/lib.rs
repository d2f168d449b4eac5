//! Quaternionic control systems on the 3-sphere: induced vector fields,
//! switched flows, sampled reachability, invariant-control-set
//! verification, spherical convexity, the supporting so(1,4) machinery,
//! and a projective-space companion system.

pub mod error;
pub mod tol;

pub mod quaternion;

pub mod cases;
pub mod convex;
pub mod fields;
pub mod flow;
pub mod lie;
pub mod linalg;
pub mod orbits;
pub mod projective;

pub use convex::SphericalRegion;
pub use error::{Error, Result};
pub use fields::{FieldSpec, Singularity, SingularityKind};
pub use flow::Trajectory;
pub use orbits::{ControlRange, ControlSystem, IcsCandidate, IcsReport, ReachCloud};
pub use quaternion::{PureQuaternion, Quaternion, UnitQuaternion};
