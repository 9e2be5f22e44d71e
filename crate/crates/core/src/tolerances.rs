//! Numerical tolerances shared across modules.
//!
//! Every threshold the library checks against lives here so that tests and the
//! CLI agree on what "zero", "symmetric" and "converged" mean.

/// Largest admissible |mean| of a Poisson source, relative to max(1, ‖f‖∞).
pub const MEAN_ZERO: f64 = 1e-10;

/// Smallest per-axis sample count; coarser grids cannot resolve the kernels.
pub const MIN_GRID_SIZE: usize = 8;

/// Smallest number of nodes per boundary component.
pub const MIN_MESH_POINTS: usize = 64;

/// Fraction of the inter-interface gap a graph perturbation may use.
pub const COLLISION_GUARD: f64 = 0.45;

/// Lateral-mode sums in the torus Green function stop once the next term is below this.
pub const GREEN_SUM_TOL: f64 = 1e-17;

/// Translation functionals with L² norm below this are treated as absent.
pub const TRANSLATION_NORM_MIN: f64 = 1e-10;

/// Relative pivot threshold for the constraint rank check.
pub const CONSTRAINT_RANK_TOL: f64 = 1e-9;

/// Bisection stopping width for stability thresholds in γ.
pub const THRESHOLD_GAMMA_TOL: f64 = 1e-6;

/// Largest strip count scanned when locating k₀.
pub const THRESHOLD_K_MAX: usize = 200;

/// Relative energy increase that triggers step rejection in the gradient flow.
pub const FLOW_ENERGY_SLACK: f64 = 1e-12;

/// Interface width must exceed this many grid spacings.
pub const MIN_EPS_OVER_H: f64 = 4.0;

/// Largest dense eigenproblem accepted.
pub const MAX_DENSE_NODES: usize = 4096;
