//! Radial solutions on balls and annuli: shooting, residuals, Morse index and
//! the nodal-domain bound.

mod morse;
mod nodal;
mod problem;
mod residual;
mod shooting;
mod solution;

pub use morse::{morse_index, morse_index_for_potential, multiplicity, ModeCount, MorseOptions, MorseReport, AUTO_L_CAP};
pub use nodal::{nodal_report, NodalBoundReport};
pub use problem::{RadialControls, RadialDomain, RadialProblemSpec};
pub use residual::{residuals, ResidualReport};
pub use shooting::{solve_radial, solve_radial_for_spec};
pub use solution::{sign_changes, RadialSolution, ShootingParameter};
