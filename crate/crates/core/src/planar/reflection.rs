//! Reflection diagnostics for a planar solution u₀ of −Δu = h(x, u).
//!
//! With x̃ = (−x₁, x₂), u_± = u₀(x̃) − u₀(x) on {±x₁ > 0} (zero elsewhere) and
//! w⁻ = max(−w, 0). The discrete energy is Φ(v) = dA·[½vᵀAv − Σ K(x, v)] with
//! A the five-point Laplacian and K the primitive of h, so Ψ(w) = Φ(u₀+w) − Φ(u₀)
//! inherits the identities of the continuous functional node for node.

use serde::Serialize;

use super::problem::PlanarField;
use super::solver::{apply_laplacian, planar_residual};
use super::symmetry::{GridField, TSignSummary};
use crate::error::Result;
use crate::nonlin::Nonlinearity;

pub const CURVE_SAMPLES: usize = 21;
pub const GRID_SAMPLES: usize = 21;
const FD_STEP: f64 = 1e-4;
const CONVEXITY_SAMPLES: usize = 5;

/// Range of the arguments met by the diagnostics and the local growth
/// constants of h there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthConstants {
    pub range_min: f64,
    pub range_max: f64,
    pub max_abs_h: f64,
    /// max |∂ₛh| on the range: a Lipschitz constant for h(x, ·).
    pub lipschitz_h: f64,
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReflectionReport {
    /// "solution" or "non-solution diagnostic".
    pub label: String,
    pub residual: f64,
    pub solution_tol: f64,
    /// Tolerance for the sign conditions, from the residual and the mesh quadrature.
    pub quadrature_tol: f64,
    pub involution_exact: bool,
    /// max |u_+(x) + u_−(x̃)|
    pub antisymmetry_error: f64,
    pub u_plus_neg_max: f64,
    pub u_minus_neg_max: f64,
    pub t: Vec<f64>,
    /// Ψ_+(−t u_+⁻), Ψ_+(t u_+⁻), Ψ_−(−t u_−⁻), Ψ_−(t u_−⁻)
    pub psi_plus_neg: Vec<f64>,
    pub psi_plus_pos: Vec<f64>,
    pub psi_minus_neg: Vec<f64>,
    pub psi_minus_pos: Vec<f64>,
    /// d/dt Ψ_±(−t u_±⁻) from the integral formula and by central differences.
    pub slope_formula_plus: Vec<f64>,
    pub slope_formula_minus: Vec<f64>,
    pub slope_fd_plus: Vec<f64>,
    pub slope_fd_minus: Vec<f64>,
    pub slope_discrepancy: f64,
    pub slope_max_positive: f64,
    /// max (Ψ_±(t u_±⁻) − Ψ_±(−t u_±⁻))⁺
    pub reflection_gap_max_violation: f64,
    /// Ψ(s u_+⁻ + t u_−⁻) on [−1, 1]², rows indexed by s.
    pub energy_grid: Vec<Vec<f64>>,
    pub energy_max: f64,
    /// max |Ψ(s u_+⁻ + t u_−⁻) − Ψ_+(s u_+⁻) − Ψ_−(t u_−⁻)|
    pub decomposition_error: f64,
    /// Fraction of nodes where h is convex on [u₀(x̃), u₀(x)] resp. [u₀(x̃), 2u₀(x) − u₀(x̃)].
    pub c1_fraction: f64,
    pub c2_fraction: f64,
    pub convexity_nodes: usize,
    pub critical_point_on_t: bool,
    pub t_derivative: Option<TSignSummary>,
    pub growth: GrowthConstants,
    /// The inequalities are asserted only for solutions.
    pub slope_holds: Option<bool>,
    pub reflection_gap_holds: Option<bool>,
    pub energy_holds: Option<bool>,
}

struct Energy<'a> {
    field: &'a PlanarField,
    nl: &'a dyn Nonlinearity,
    a_u0: Vec<f64>,
    k_u0: Vec<f64>,
    area: f64,
}

impl<'a> Energy<'a> {
    fn new(field: &'a PlanarField, nl: &'a dyn Nonlinearity) -> Result<Self> {
        let p = &field.problem;
        let a_u0 = apply_laplacian(p, &field.v);
        let mut k_u0 = vec![0.0; p.node_count()];
        for i in 1..p.n1 {
            for j in 1..p.n2 {
                let k = p.node(i, j);
                k_u0[k] = nl.primitive(&[p.x1(i), p.x2(j)], field.v[k])?;
            }
        }
        Ok(Energy {
            field,
            nl,
            a_u0,
            k_u0,
            area: p.dx() * p.dy(),
        })
    }

    /// Ψ(c·w)
    fn psi(&self, w: &[f64], c: f64) -> Result<f64> {
        let p = &self.field.problem;
        let cw: Vec<f64> = w.iter().map(|x| c * x).collect();
        let a_w = apply_laplacian(p, &cw);
        let mut sum = 0.0;
        for i in 1..p.n1 {
            for j in 1..p.n2 {
                let k = p.node(i, j);
                if cw[k] == 0.0 {
                    continue;
                }
                let kv = self.nl.primitive(&[p.x1(i), p.x2(j)], self.field.v[k] + cw[k])?;
                sum += cw[k] * self.a_u0[k] + 0.5 * cw[k] * a_w[k] - (kv - self.k_u0[k]);
            }
        }
        Ok(self.area * sum)
    }

    /// ∫ [h(x,(1−t)u₀(x)+tu₀(x̃)) − (1−t)h(x,u₀(x)) − t h(x,u₀(x̃))] w
    fn slope(&self, w: &[f64], t: f64) -> Result<f64> {
        let p = &self.field.problem;
        let v = &self.field.v;
        let mut sum = 0.0;
        for i in 1..p.n1 {
            for j in 1..p.n2 {
                let k = p.node(i, j);
                if w[k] == 0.0 {
                    continue;
                }
                let x = [p.x1(i), p.x2(j)];
                let (own, refl) = (v[k], v[p.node(p.mirror(i), j)]);
                let mixed = self.nl.h(&x, (1.0 - t) * own + t * refl)?;
                sum += (mixed - (1.0 - t) * self.nl.h(&x, own)? - t * self.nl.h(&x, refl)?) * w[k];
            }
        }
        Ok(self.area * sum)
    }
}

fn convex_on(nl: &dyn Nonlinearity, x: &[f64], a: f64, b: f64, tol: f64) -> Result<Option<bool>> {
    let limit = nl.amplitude_limit();
    if a.abs() > limit || b.abs() > limit {
        return Ok(None);
    }
    for q in 0..CONVEXITY_SAMPLES {
        let s = a + (b - a) * q as f64 / (CONVEXITY_SAMPLES - 1) as f64;
        if nl.d2h(x, s)? < -tol {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

/// Runs every reflection diagnostic on `field` (its v is u₀). Fields whose
/// residual exceeds `solution_tol` are labeled non-solution diagnostics and
/// no inequality verdicts are attached.
pub fn reflection_diagnostics(field: &PlanarField, nl: &dyn Nonlinearity, solution_tol: f64) -> Result<ReflectionReport> {
    let p = &field.problem;
    let v = &field.v;
    let residual = planar_residual(p, nl, v)?;
    let is_solution = residual <= solution_tol;
    let mid = p.n1 / 2;

    let reflected: Vec<f64> = (0..p.node_count())
        .map(|k| {
            let (i, j) = (k / (p.n2 + 1), k % (p.n2 + 1));
            v[p.node(p.mirror(i), j)]
        })
        .collect();
    let twice: Vec<f64> = (0..p.node_count())
        .map(|k| {
            let (i, j) = (k / (p.n2 + 1), k % (p.n2 + 1));
            reflected[p.node(p.mirror(i), j)]
        })
        .collect();
    let involution_exact = twice.iter().zip(v).all(|(a, b)| a.to_bits() == b.to_bits());

    let mut u_plus = vec![0.0; p.node_count()];
    let mut u_minus = vec![0.0; p.node_count()];
    for i in 0..=p.n1 {
        for j in 0..=p.n2 {
            let k = p.node(i, j);
            let d = reflected[k] - v[k];
            if i > mid {
                u_plus[k] = d;
            } else if i < mid {
                u_minus[k] = d;
            }
        }
    }
    let mut antisymmetry_error = 0.0f64;
    for i in mid + 1..=p.n1 {
        for j in 0..=p.n2 {
            let k = p.node(i, j);
            antisymmetry_error = antisymmetry_error.max((u_plus[k] + u_minus[p.node(p.mirror(i), j)]).abs());
        }
    }
    let neg = |w: &[f64]| w.iter().map(|x| (-x).max(0.0)).collect::<Vec<_>>();
    let (wp, wm) = (neg(&u_plus), neg(&u_minus));
    let max_of = |w: &[f64]| w.iter().fold(0.0f64, |m, x| m.max(*x));

    let energy = Energy::new(field, nl)?;
    let t: Vec<f64> = (0..CURVE_SAMPLES).map(|q| q as f64 / (CURVE_SAMPLES - 1) as f64).collect();
    let curve = |w: &[f64], sign: f64| -> Result<Vec<f64>> { t.iter().map(|&s| energy.psi(w, sign * s)).collect() };
    let psi_plus_neg = curve(&wp, -1.0)?;
    let psi_plus_pos = curve(&wp, 1.0)?;
    let psi_minus_neg = curve(&wm, -1.0)?;
    let psi_minus_pos = curve(&wm, 1.0)?;

    let formula = |w: &[f64]| -> Result<Vec<f64>> { t.iter().map(|&s| energy.slope(w, s)).collect() };
    let fd = |w: &[f64]| -> Result<Vec<f64>> {
        t.iter()
            .map(|&s| Ok((energy.psi(w, -(s + FD_STEP))? - energy.psi(w, -(s - FD_STEP))?) / (2.0 * FD_STEP)))
            .collect()
    };
    let slope_formula_plus = formula(&wp)?;
    let slope_formula_minus = formula(&wm)?;
    let slope_fd_plus = fd(&wp)?;
    let slope_fd_minus = fd(&wm)?;
    let discrepancy = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let slope_discrepancy = discrepancy(&slope_formula_plus, &slope_fd_plus)
        .max(discrepancy(&slope_formula_minus, &slope_fd_minus));
    let slope_max_positive = slope_formula_plus
        .iter()
        .chain(&slope_formula_minus)
        .fold(0.0f64, |m, x| m.max(*x));
    let reflection_gap_max_violation = psi_plus_pos
        .iter()
        .zip(&psi_plus_neg)
        .chain(psi_minus_pos.iter().zip(&psi_minus_neg))
        .fold(0.0f64, |m, (pos, negv)| m.max(pos - negv));

    let st: Vec<f64> = (0..GRID_SAMPLES)
        .map(|q| -1.0 + 2.0 * q as f64 / (GRID_SAMPLES - 1) as f64)
        .collect();
    let plus_only: Vec<f64> = st.iter().map(|&s| energy.psi(&wp, s)).collect::<Result<_>>()?;
    let minus_only: Vec<f64> = st.iter().map(|&s| energy.psi(&wm, s)).collect::<Result<_>>()?;
    let mut energy_grid = Vec::with_capacity(GRID_SAMPLES);
    let mut energy_max = f64::NEG_INFINITY;
    let mut decomposition_error = 0.0f64;
    for (a, &s) in st.iter().enumerate() {
        let mut row = Vec::with_capacity(GRID_SAMPLES);
        for (b, &tt) in st.iter().enumerate() {
            let w: Vec<f64> = wp.iter().zip(&wm).map(|(x, y)| s * x + tt * y).collect();
            let val = energy.psi(&w, 1.0)?;
            decomposition_error = decomposition_error.max((val - plus_only[a] - minus_only[b]).abs());
            energy_max = energy_max.max(val);
            row.push(val);
        }
        energy_grid.push(row);
    }

    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let mut h2_scale = 0.0f64;
    let (mut c1_ok, mut c2_ok, mut counted) = (0usize, 0usize, 0usize);
    let mut pending = Vec::new();
    for i in 1..p.n1 {
        for j in 1..p.n2 {
            let k = p.node(i, j);
            let (own, refl) = (v[k], reflected[k]);
            lo = lo.min(own.min(refl)).min(2.0 * own - refl);
            hi = hi.max(own.max(refl)).max(2.0 * own - refl);
            if own != refl {
                pending.push((i, j, own, refl));
            }
        }
    }
    let samples = 201;
    let (mut max_abs_h, mut lipschitz_h) = (0.0f64, 0.0f64);
    let x_mid = [0.0, 0.5 * p.height];
    let limit = nl.amplitude_limit();
    let (glo, ghi) = (lo.max(-limit), hi.min(limit));
    for q in 0..samples {
        let s = glo + (ghi - glo) * q as f64 / (samples - 1) as f64;
        max_abs_h = max_abs_h.max(nl.h(&x_mid, s)?.abs());
        lipschitz_h = lipschitz_h.max(nl.dh(&x_mid, s)?.abs());
        h2_scale = h2_scale.max(nl.d2h(&x_mid, s)?.abs());
    }
    let convex_tol = 1e-12 * h2_scale.max(1.0);
    for (i, j, own, refl) in pending {
        let x = [p.x1(i), p.x2(j)];
        let c1 = convex_on(nl, &x, refl, own, convex_tol)?;
        let c2 = convex_on(nl, &x, refl, 2.0 * own - refl, convex_tol)?;
        if let (Some(a), Some(b)) = (c1, c2) {
            counted += 1;
            c1_ok += a as usize;
            c2_ok += b as usize;
        }
    }
    let fraction = |ok: usize| if counted == 0 { 1.0 } else { ok as f64 / counted as f64 };

    let grid = GridField {
        x: (0..=p.n1).map(|i| p.x1(i)).collect(),
        y: (0..=p.n2).map(|j| p.x2(j)).collect(),
        values: v.clone(),
        mask: vec![true; p.node_count()],
        center: [0.0, 0.5 * p.height],
    };
    let sym = super::symmetry::symmetry_metrics(&grid, 4)?;
    let critical_point_on_t = sym.critical_points.iter().any(|c| c.distance_to_t == 0.0);

    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let domain_area = 2.0 * p.half_width * p.height;
    let quadrature_tol = 10.0 * residual * domain_area * vmax.max(1.0) + 1e-12 * (1.0 + max_abs_h * vmax * domain_area);
    let verdict = |ok: bool| if is_solution { Some(ok) } else { None };
    Ok(ReflectionReport {
        label: if is_solution { "solution" } else { "non-solution diagnostic" }.into(),
        residual,
        solution_tol,
        quadrature_tol,
        involution_exact,
        antisymmetry_error,
        u_plus_neg_max: max_of(&wp),
        u_minus_neg_max: max_of(&wm),
        t,
        psi_plus_neg,
        psi_plus_pos,
        psi_minus_neg,
        psi_minus_pos,
        slope_holds: verdict(slope_max_positive <= quadrature_tol),
        reflection_gap_holds: verdict(reflection_gap_max_violation <= quadrature_tol),
        energy_holds: verdict(energy_max <= quadrature_tol),
        slope_formula_plus,
        slope_formula_minus,
        slope_fd_plus,
        slope_fd_minus,
        slope_discrepancy,
        slope_max_positive,
        reflection_gap_max_violation,
        energy_grid,
        energy_max,
        decomposition_error,
        c1_fraction: fraction(c1_ok),
        c2_fraction: fraction(c2_ok),
        convexity_nodes: counted,
        critical_point_on_t,
        t_derivative: sym.t_derivative,
        growth: GrowthConstants {
            range_min: lo,
            range_max: hi,
            max_abs_h,
            lipschitz_h,
            bounded: max_abs_h.is_finite() && lipschitz_h.is_finite() && lo >= -limit && hi <= limit,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlin::{bundle_for, NonlinearitySpec};
    use crate::planar::PlanarProblemSpec;

    fn field_from(p: PlanarProblemSpec, f: impl Fn(f64, f64) -> f64) -> PlanarField {
        let mut v = vec![0.0; p.node_count()];
        for i in 1..p.n1 {
            for j in 1..p.n2 {
                v[p.node(i, j)] = f(p.x1(i), p.x2(j));
            }
        }
        PlanarField {
            problem: p,
            u: v.clone(),
            v,
            residual: f64::NAN,
            residual_history: vec![],
            iterations: 0,
            converged: false,
            trivial: false,
            seeds_tried: 0,
            warnings: vec![],
        }
    }

    fn mesh() -> PlanarProblemSpec {
        PlanarProblemSpec {
            half_width: 1.0,
            height: 1.0,
            n1: 16,
            n2: 8,
        }
    }

    fn bundle() -> crate::nonlin::DerivativeBundle {
        bundle_for(NonlinearitySpec::power(2.0, 5.0, 2).unwrap(), 20.0, 1e-12).unwrap()
    }

    #[test]
    fn even_field_gives_flat_curves() {
        let f = field_from(mesh(), |x1, x2| (1.0 - x1 * x1) * x2 * (1.0 - x2));
        let rep = reflection_diagnostics(&f, &bundle(), 1e-8).unwrap();
        assert!(rep.involution_exact);
        assert_eq!(rep.u_plus_neg_max, 0.0);
        assert!(rep.psi_plus_neg.iter().chain(&rep.psi_minus_pos).all(|x| *x == 0.0));
        assert!(rep.energy_grid.iter().flatten().all(|x| *x == 0.0));
        assert_eq!(rep.slope_discrepancy, 0.0);
        // not a solution of the PDE
        assert_eq!(rep.label, "non-solution diagnostic");
        assert!(rep.energy_holds.is_none());
    }

    #[test]
    fn asymmetric_field_satisfies_bookkeeping_identities() {
        let f = field_from(mesh(), |x1, x2| (1.0 - x1 * x1) * x2 * (1.0 - x2) * (1.0 + 0.5 * x1));
        let rep = reflection_diagnostics(&f, &bundle(), 1e-8).unwrap();
        assert!(rep.u_plus_neg_max > 0.0 || rep.u_minus_neg_max > 0.0);
        assert_eq!(rep.antisymmetry_error, 0.0);
        assert!(rep.decomposition_error <= 1e-12, "{}", rep.decomposition_error);
        assert_eq!(rep.psi_plus_neg[0], 0.0);
    }
}
