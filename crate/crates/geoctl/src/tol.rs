//! Centralized numerical tolerances.
//!
//! Two regimes: algebraic identities that hold up to f64 rounding, and
//! flow/sampling contracts that absorb integration error.

/// Algebraic identities (products, tangency, membership checks).
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// Contracts on integrated trajectories (endpoint errors, invariance slack).
pub const FLOW_TOL: f64 = 1e-6;

/// Pivot threshold for rank computations in bracket closures. Basis entries
/// are integers or simple surds, so the numerical rank is unambiguous far
/// above this.
pub const PIVOT_TOL: f64 = 1e-9;

/// Central-difference step for vector-field bracket checks. Balances
/// truncation against roundoff for the 1e-3 residual contract.
pub const FD_STEP: f64 = 1e-5;

/// Central-difference step for linearizations at singular points.
pub const LINEARIZATION_STEP: f64 = 1e-6;

/// Margin on eigenvalue real parts when classifying attractors/repellers.
pub const EIGEN_MARGIN: f64 = 1e-9;

/// Worst-violation bound for sampled invariance claims.
pub const INVARIANCE_TOL: f64 = 1e-3;

/// Chordal radius for approximate-reachability checks against sampled clouds.
pub const REACH_DELTA: f64 = 5e-2;

/// Smallest norm accepted by sphere projection.
pub const MIN_NORM: f64 = 1e-14;
