use serde::Serialize;

use super::morse::MorseReport;
use super::solution::RadialSolution;

/// nod(u) ≤ 1 + m/(N+1) for one solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalBoundReport {
    pub nod_u: usize,
    pub nod_v: usize,
    pub morse_index: u64,
    pub dim: usize,
    pub bound: f64,
    pub satisfied: bool,
    /// Smallest index compatible with the observed nod(u).
    pub required_index: u64,
    /// Morse count may be incomplete or has near-zero eigenvalues.
    pub morse_caveat: bool,
}

/// Radial level sets are spheres, so nodal domains are the sign intervals of the profile.
pub fn nodal_report(sol: &RadialSolution, morse: &MorseReport, dim: usize) -> NodalBoundReport {
    let nod_u = 1 + sol.interior_sign_changes(&sol.u);
    let nod_v = 1 + sol.interior_sign_changes(&sol.v);
    let bound = 1.0 + morse.index as f64 / (dim as f64 + 1.0);
    NodalBoundReport {
        nod_u,
        nod_v,
        morse_index: morse.index,
        dim,
        bound,
        satisfied: nod_u as f64 <= bound,
        required_index: (nod_u as u64 - 1) * (dim as u64 + 1),
        morse_caveat: morse.possibly_truncated || morse.borderline,
    }
}
