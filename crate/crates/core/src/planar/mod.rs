//! The transformed problem on x₁-symmetric rectangles, reflection diagnostics
//! and symmetry metrics.

mod problem;
mod reflection;
mod solver;
mod symmetry;

pub use problem::{planar_warnings, PlanarControls, PlanarField, PlanarProblemSpec};
pub use reflection::{reflection_diagnostics, GrowthConstants, ReflectionReport, CURVE_SAMPLES, GRID_SAMPLES};
pub use solver::{planar_residual, solve_planar};
pub use symmetry::{symmetry_metrics, CriticalPoint, GridField, SymmetryReport, TSignSummary, DEFAULT_DIRECTIONS};
