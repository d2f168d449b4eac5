//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite component in input")]
    NonFinite,

    #[error("quaternion norm {norm} is not 1 within tolerance")]
    NotUnit { norm: f64 },

    #[error("cannot project a near-zero quaternion to the sphere (norm {norm:e})")]
    DegeneratePoint { norm: f64 },

    #[error("inverse of a zero quaternion")]
    ZeroInverse,

    #[error("matrix is not in the algebra (membership residual {residual:e})")]
    NotInAlgebra { residual: f64 },

    #[error("matrix has a nonzero rotation block (residual {residual:e})")]
    NotSymmetricPart { residual: f64 },

    #[error("empty generator list")]
    EmptyGenerators,

    #[error("antipodal endpoints admit no unique minimal geodesic")]
    AntipodalEndpoints,

    #[error("control {0:?} lies outside the control range")]
    ControlOutOfRange(Vec<f64>),

    #[error("the zero field is singular everywhere")]
    DegenerateField,

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid control system: {0}")]
    InvalidSystem(String),

    #[error("invalid case configuration: {0}")]
    InvalidCase(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
