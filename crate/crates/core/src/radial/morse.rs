//! Morse index of a radial solution by separation into spherical harmonics.
//!
//! Mode l gives the radial operator −w″ − (N−1)/r·w′ + l(l+N−2)/r²·w − V(r)w,
//! discretized by finite volumes with exact shell volumes and symmetrized with
//! the mass matrix, so each mode reduces to a Sturm count on a tridiagonal.

use rayon::prelude::*;
use serde::Serialize;

use super::problem::RadialDomain;
use super::solution::RadialSolution;
use crate::error::{invalid, Result};
use crate::linalg::SymTridiagonal;
use crate::nonlin::Nonlinearity;

pub const AUTO_L_CAP: usize = 50;
const REPORTED_EIGENVALUES: usize = 3;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MorseOptions {
    /// Highest mode; `None` stops at the first mode without negative eigenvalues.
    pub l_max: Option<usize>,
    /// Intervals of the eigenvalue grid; `None` reuses the solution grid.
    pub modes_grid: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeCount {
    pub l: usize,
    pub multiplicity: u64,
    pub negative: usize,
    /// Eigenvalues within ±margin of zero (not counted as negative).
    pub borderline: usize,
    pub lambda_min: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorseReport {
    pub modes: Vec<ModeCount>,
    pub index: u64,
    pub l_max: usize,
    pub grid_intervals: usize,
    pub eig_margin: f64,
    /// The last computed mode still had negative eigenvalues.
    pub possibly_truncated: bool,
    pub borderline: bool,
}

impl MorseReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,multiplicity,negative,borderline,lambda_min\n");
        for m in &self.modes {
            let lam = m.lambda_min.first().copied().unwrap_or(f64::NAN);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                m.l,
                m.multiplicity,
                m.negative,
                m.borderline,
                crate::format::num(lam)
            ));
        }
        out
    }
}

fn binomial(n: i64, k: i64) -> u64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Dimension of the degree-l spherical harmonics in ℝ^N.
pub fn multiplicity(l: usize, dim: usize) -> u64 {
    let (n, l) = (dim as i64, l as i64);
    binomial(n + l - 1, l) - binomial(n + l - 3, l - 2)
}

/// Tridiagonal model of mode l on the grid r_0 < … < r_M with potential V_i.
fn mode_matrix(domain: &RadialDomain, dim: usize, radii: &[f64], potential: &[f64], l: usize) -> SymTridiagonal {
    let n = dim as f64;
    let m = radii.len() - 1;
    let h = (radii[m] - radii[0]) / m as f64;
    let angular = (l * (l + dim - 2)) as f64;
    // l = 0 on a ball keeps the center node (natural condition); otherwise w = 0 there
    let first = if domain.is_ball() && l == 0 { 0 } else { 1 };
    let face = |i: usize| (radii[i] + 0.5 * h).powf(n - 1.0) / h; // between i and i+1
    let volume = |i: usize| {
        let lo = if i == 0 { radii[0] } else { radii[i] - 0.5 * h };
        let hi = radii[i] + 0.5 * h;
        if i == 0 && domain.is_ball() {
            hi.powf(n) / n
        } else {
            (hi.powf(n) - lo.powf(n)) / n
        }
    };
    let idx: Vec<usize> = (first..m).collect();
    let vols: Vec<f64> = idx.iter().map(|&i| volume(i)).collect();
    let diag = idx
        .iter()
        .zip(&vols)
        .map(|(&i, vol)| {
            let left = if i == 0 { 0.0 } else { face(i - 1) };
            let centrifugal = if angular == 0.0 { 0.0 } else { angular / (radii[i] * radii[i]) };
            (left + face(i)) / vol + centrifugal - potential[i]
        })
        .collect();
    let off = idx
        .windows(2)
        .zip(vols.windows(2))
        .map(|(i, v)| -face(i[0]) / (v[0] * v[1]).sqrt())
        .collect();
    SymTridiagonal::new(diag, off)
}

fn count_mode(domain: &RadialDomain, dim: usize, radii: &[f64], potential: &[f64], l: usize, margin: f64) -> ModeCount {
    let t = mode_matrix(domain, dim, radii, potential, l);
    let negative = t.count_below(-margin);
    let borderline = t.count_below(margin) - negative;
    let lambda_min = (0..REPORTED_EIGENVALUES.min(t.len()))
        .filter_map(|j| t.eigenvalue(j))
        .collect();
    ModeCount {
        l,
        multiplicity: multiplicity(l, dim),
        negative,
        borderline,
        lambda_min,
    }
}

/// Morse index for the potential V sampled on a uniform radial grid.
pub fn morse_index_for_potential(
    domain: &RadialDomain,
    dim: usize,
    radii: &[f64],
    potential: &[f64],
    l_max: Option<usize>,
) -> Result<MorseReport> {
    if radii.len() < 5 || radii.len() != potential.len() {
        return invalid(format!(
            "need matching grid and potential with at least 5 points, got {} and {}",
            radii.len(),
            potential.len()
        ));
    }
    if dim < 2 {
        return invalid(format!("dimension must be at least 2, got {dim}"));
    }
    let scale = potential.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let margin = (1e-8 * scale).max(1e-14);
    let modes: Vec<ModeCount> = match l_max {
        Some(top) => (0..=top)
            .into_par_iter()
            .map(|l| count_mode(domain, dim, radii, potential, l, margin))
            .collect(),
        None => {
            let mut out = Vec::new();
            for l in 0..=AUTO_L_CAP {
                let c = count_mode(domain, dim, radii, potential, l, margin);
                let done = c.negative == 0;
                out.push(c);
                if done {
                    break;
                }
            }
            out
        }
    };
    let last = modes.last().unwrap();
    Ok(MorseReport {
        index: modes.iter().map(|c| c.negative as u64 * c.multiplicity).sum(),
        l_max: last.l,
        grid_intervals: radii.len() - 1,
        eig_margin: margin,
        possibly_truncated: last.negative > 0,
        borderline: modes.iter().any(|c| c.borderline > 0),
        modes,
    })
}

/// Morse index of v for the form ∫|Dφ|² − ∫∂ₛh(x, v)φ².
pub fn morse_index(sol: &RadialSolution, nl: &dyn Nonlinearity, options: &MorseOptions) -> Result<MorseReport> {
    let (radii, v) = match options.modes_grid {
        Some(m) if m + 1 != sol.grid.len() => {
            if m < 4 {
                return invalid(format!("modes grid needs at least 4 intervals, got {m}"));
            }
            let (r0, r1) = (sol.grid[0], *sol.grid.last().unwrap());
            let radii: Vec<f64> = (0..=m).map(|i| r0 + (r1 - r0) * i as f64 / m as f64).collect();
            let v = radii.iter().map(|&r| sol.v_at(r)).collect();
            (radii, v)
        }
        _ => (sol.grid.clone(), sol.v.clone()),
    };
    let potential = radii
        .iter()
        .zip(&v)
        .map(|(&r, &s)| nl.dh(&[r], s))
        .collect::<Result<Vec<_>>>()?;
    morse_index_for_potential(&sol.domain, sol.dim, &radii, &potential, options.l_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ball_grid(radius: f64, m: usize) -> Vec<f64> {
        (0..=m).map(|i| radius * i as f64 / m as f64).collect()
    }

    #[test]
    fn harmonic_dimensions() {
        assert_eq!(multiplicity(0, 2), 1);
        assert_eq!(multiplicity(1, 2), 2);
        assert_eq!(multiplicity(5, 2), 2);
        assert_eq!(multiplicity(0, 3), 1);
        assert_eq!(multiplicity(1, 3), 3);
        assert_eq!(multiplicity(2, 3), 5);
        assert_eq!(multiplicity(2, 4), 9);
    }

    #[test]
    fn zero_potential_has_index_zero() {
        let r = ball_grid(1.0, 400);
        let rep = morse_index_for_potential(&RadialDomain::Ball { radius: 1.0 }, 3, &r, &vec![0.0; 401], None).unwrap();
        assert_eq!(rep.index, 0);
        assert_eq!(rep.modes.len(), 1);
    }

    #[test]
    fn dirichlet_ball_eigenvalues() {
        // −Δ on the unit-π ball in ℝ³: radial eigenvalues n², first l = 1 eigenvalue (4.49341/π)²
        let r = ball_grid(PI, 2000);
        let rep =
            morse_index_for_potential(&RadialDomain::Ball { radius: PI }, 3, &r, &vec![0.0; 2001], Some(1)).unwrap();
        let l0 = &rep.modes[0].lambda_min;
        assert!((l0[0] - 1.0).abs() < 1e-4, "{l0:?}");
        assert!((l0[1] - 4.0).abs() < 1e-3, "{l0:?}");
        let l1 = rep.modes[1].lambda_min[0];
        assert!((l1 - (4.493409457909064 / PI).powi(2)).abs() < 1e-4, "{l1}");
    }

    #[test]
    fn constant_potential_two() {
        let r = ball_grid(PI, 2000);
        let rep = morse_index_for_potential(&RadialDomain::Ball { radius: PI }, 3, &r, &vec![2.0; 2001], None).unwrap();
        assert_eq!(rep.index, 1);
        assert_eq!(rep.modes.iter().map(|m| m.negative).collect::<Vec<_>>(), vec![1, 0]);
        assert!(!rep.borderline && !rep.possibly_truncated);
    }

    #[test]
    fn explicit_lmax_flags_truncation() {
        let r = ball_grid(PI, 500);
        let rep = morse_index_for_potential(&RadialDomain::Ball { radius: PI }, 3, &r, &vec![30.0; 501], Some(1)).unwrap();
        assert!(rep.possibly_truncated);
    }

    #[test]
    fn annulus_first_eigenvalue() {
        // radial Dirichlet eigenfunctions on (1, 2) in ℝ³ are sin(nπ(r−1))/r
        let r: Vec<f64> = (0..=2000).map(|i| 1.0 + i as f64 / 2000.0).collect();
        let dom = RadialDomain::Annulus { inner: 1.0, outer: 2.0 };
        let rep = morse_index_for_potential(&dom, 3, &r, &vec![0.0; 2001], Some(0)).unwrap();
        assert!((rep.modes[0].lambda_min[0] - PI * PI).abs() < 1e-4);
    }
}
