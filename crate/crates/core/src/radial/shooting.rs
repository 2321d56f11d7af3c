//! Shooting on the center value (ball) or inner slope (annulus), bisecting on
//! the number of sign changes of v over the whole grid.

use super::problem::{RadialControls, RadialDomain, RadialProblemSpec};
use super::residual::residuals;
use super::solution::{sign_changes, RadialSolution, ShootingParameter};
use crate::error::{Error, Result};
use crate::nonlin::{bundle_for, DerivativeBundle, Nonlinearity, NonlinearitySpec, DEFAULT_S_MAX};
use crate::ode::{integrate_to_nodes, OdeOptions};

/// Profile on the grid for one trial parameter.
struct Trial {
    parameter: f64,
    v: Vec<f64>,
    dv: Vec<f64>,
    u: Vec<f64>,
}

impl Trial {
    fn boundary_value(&self) -> f64 {
        *self.v.last().unwrap()
    }

    /// Sign changes over all nodes, the outer boundary included.
    fn crossings(&self) -> usize {
        sign_changes(&self.v)
    }

    fn interior_crossings(&self) -> usize {
        sign_changes(&self.v[..self.v.len() - 1])
    }
}

fn grid(domain: &RadialDomain, intervals: usize) -> Vec<f64> {
    let (r0, r1) = (domain.inner(), domain.outer());
    let h = (r1 - r0) / intervals as f64;
    (0..=intervals)
        .map(|i| if i == intervals { r1 } else { r0 + i as f64 * h })
        .collect()
}

fn shoot(
    problem: &RadialProblemSpec,
    nl: &dyn Nonlinearity,
    controls: &RadialControls,
    radii: &[f64],
    parameter: f64,
) -> Result<Trial> {
    let limit = nl.amplitude_limit();
    let n = problem.dim as f64;
    // u = g(v) is carried along through u' = v'/√a(u), which keeps it smooth in r
    let rhs = |r: f64, y: &[f64; 3]| -> Result<[f64; 3]> {
        if y[0].abs() > limit {
            return Err(Error::ShootingOverflow { parameter, r });
        }
        let a = nl.quasi_terms(&[r], y[2])?.a;
        Ok([y[1], -(n - 1.0) / r * y[1] - nl.h(&[r], y[0])?, y[1] / a.sqrt()])
    };
    let opts = OdeOptions::with_tol(controls.ode_tol);
    let mut v = Vec::with_capacity(radii.len());
    let mut dv = Vec::with_capacity(radii.len());
    let mut u = Vec::with_capacity(radii.len());
    let states = match problem.domain {
        RadialDomain::Ball { radius } => {
            if parameter.abs() > limit {
                return Err(Error::ShootingOverflow { parameter, r: 0.0 });
            }
            // v = α + c₂r² + c₄r⁴ + O(r⁶) on [0, r_start]
            let r_start = (1e-4 * radius).min(0.5 * radii[1]);
            let h0 = nl.h(&[0.0], parameter)?;
            let c2 = -h0 / (2.0 * n);
            let c4 = -nl.dh(&[0.0], parameter)? * c2 / (4.0 * (n + 2.0));
            let rs2 = r_start * r_start;
            let shift = c2 * rs2 + c4 * rs2 * rs2;
            let v_start = parameter + shift;
            let slope = 2.0 * c2 * r_start + 4.0 * c4 * rs2 * r_start;
            // u from g(α) by a Taylor step: g' = a^{-1/2}, g'' = −a'/(2a²)
            let u0 = nl.transform(parameter)?;
            let q = nl.quasi_terms(&[0.0], u0)?;
            let u_start = u0 + shift / q.a.sqrt() - 0.25 * q.da / (q.a * q.a) * shift * shift;
            let y0 = [v_start, slope, u_start];
            v.push(parameter);
            dv.push(0.0);
            u.push(u0);
            integrate_to_nodes(rhs, r_start, y0, &radii[1..], &opts, |_, _| true)?
        }
        RadialDomain::Annulus { inner, .. } => {
            v.push(0.0);
            dv.push(parameter);
            u.push(0.0);
            integrate_to_nodes(rhs, inner, [0.0, parameter, 0.0], &radii[1..], &opts, |_, _| true)?
        }
    };
    for y in states {
        v.push(y[0]);
        dv.push(y[1]);
        u.push(y[2]);
    }
    Ok(Trial { parameter, v, dv, u })
}

/// Solves −Δv = h(|x|, v) radially with v = 0 on the boundary and
/// `target_nodes` interior zeros, then samples u = g(v) and the residuals.
pub fn solve_radial(
    problem: &RadialProblemSpec,
    nl: &dyn Nonlinearity,
    controls: &RadialControls,
) -> Result<RadialSolution> {
    problem.validate()?;
    controls.validate()?;
    let radii = grid(&problem.domain, controls.grid_intervals);
    let target = problem.target_nodes;
    let limit = nl.amplitude_limit();
    let run = |x: f64| shoot(problem, nl, controls, &radii, x);
    let accept = |t: &Trial| t.boundary_value().abs() <= controls.bc_tol && t.interior_crossings() == target;
    let too_far = |t: &Trial| t.crossings() > target;

    // bracket [lo, hi] with too_far(lo) false, too_far(hi) true
    let mut probe = run(controls.initial_parameter)?;
    if accept(&probe) {
        return finish(problem, nl, &radii, probe);
    }
    let (mut lo, mut hi);
    let mut steps = 0;
    if too_far(&probe) {
        hi = probe;
        loop {
            let trial = run(0.5 * hi.parameter)?;
            if accept(&trial) {
                return finish(problem, nl, &radii, trial);
            }
            if !too_far(&trial) {
                lo = trial;
                break;
            }
            hi = trial;
            steps += 1;
            if steps > controls.max_bisections || hi.parameter < 1e-300 {
                return Err(Error::NonConvergence(format!(
                    "no parameter in ({:e}, {:e}] gives at most {target} sign changes",
                    hi.parameter, controls.initial_parameter
                )));
            }
        }
    } else {
        lo = probe;
        loop {
            // the center value is an amplitude; an inner slope is only bounded through the trajectory
            let cap = if problem.domain.is_ball() { limit } else { f64::MAX };
            let next = (2.0 * lo.parameter).min(cap);
            if next <= lo.parameter {
                return Err(Error::ShootingOverflow {
                    parameter: lo.parameter,
                    r: problem.domain.inner(),
                });
            }
            probe = run(next)?;
            if accept(&probe) {
                return finish(problem, nl, &radii, probe);
            }
            if too_far(&probe) {
                hi = probe;
                break;
            }
            lo = probe;
            steps += 1;
            if steps > controls.max_bisections {
                return Err(Error::NonConvergence(format!(
                    "no parameter in [{:e}, {:e}] gives {} sign changes",
                    controls.initial_parameter,
                    lo.parameter,
                    target + 1
                )));
            }
        }
    }

    for _ in 0..controls.max_bisections {
        let mid = 0.5 * (lo.parameter + hi.parameter);
        if mid <= lo.parameter || mid >= hi.parameter {
            break;
        }
        let trial = run(mid)?;
        if accept(&trial) {
            return finish(problem, nl, &radii, trial);
        }
        if too_far(&trial) {
            hi = trial;
        } else {
            lo = trial;
        }
    }
    // Bracket collapsed to adjacent floats; take the side with the target class.
    let best = [lo, hi]
        .into_iter()
        .filter(|t| t.interior_crossings() == target)
        .min_by(|a, b| a.boundary_value().abs().total_cmp(&b.boundary_value().abs()));
    match best {
        Some(t) if t.boundary_value().abs() <= controls.bc_tol.max(1e3 * f64::EPSILON * t.parameter.abs()) => {
            finish(problem, nl, &radii, t)
        }
        Some(t) => Err(Error::NonConvergence(format!(
            "shooting stalled at parameter {:e} with boundary value {:e}",
            t.parameter,
            t.boundary_value()
        ))),
        None => Err(Error::NonConvergence(format!(
            "bisection did not isolate a profile with {target} interior zeros"
        ))),
    }
}

/// Table doublings tried by [`solve_radial_for_spec`] before giving up.
const TABLE_DOUBLINGS: usize = 8;

/// Tabulates g for `spec` and solves. With `s_max = None` the table starts at
/// the default range and doubles whenever shooting leaves it.
pub fn solve_radial_for_spec(
    problem: &RadialProblemSpec,
    spec: NonlinearitySpec,
    controls: &RadialControls,
    s_max: Option<f64>,
    g_tol: f64,
) -> Result<(RadialSolution, DerivativeBundle)> {
    if !spec.psi.is_radial() {
        return Err(Error::InvalidInput(format!("weight {} is not radial", spec.psi)));
    }
    if spec.dim != problem.dim {
        return Err(Error::InvalidInput(format!(
            "nonlinearity dimension {} differs from problem dimension {}",
            spec.dim, problem.dim
        )));
    }
    let mut range = s_max.unwrap_or(DEFAULT_S_MAX);
    let attempts = if s_max.is_some() { 1 } else { TABLE_DOUBLINGS + 1 };
    let mut last = None;
    for _ in 0..attempts {
        let bundle = bundle_for(spec, range, g_tol)?;
        match solve_radial(problem, &bundle, controls) {
            Ok(sol) => return Ok((sol, bundle)),
            Err(e @ Error::ShootingOverflow { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
        range *= 2.0;
    }
    Err(last.expect("at least one attempt"))
}

fn finish(problem: &RadialProblemSpec, nl: &dyn Nonlinearity, radii: &[f64], trial: Trial) -> Result<RadialSolution> {
    let parameter = match problem.domain {
        RadialDomain::Ball { .. } => ShootingParameter::CenterValue(trial.parameter),
        RadialDomain::Annulus { .. } => ShootingParameter::InnerSlope(trial.parameter),
    };
    let mut sol = RadialSolution {
        domain: problem.domain,
        dim: problem.dim,
        grid: radii.to_vec(),
        v: trial.v,
        u: trial.u,
        dv: trial.dv,
        parameter,
        interior_zeros: 0,
        semilinear_residual: f64::NAN,
        quasilinear_residual: f64::NAN,
        semilinear_residual_fourth_order: f64::NAN,
        quasilinear_residual_fourth_order: f64::NAN,
    };
    sol.interior_zeros = sol.interior_sign_changes(&sol.v);
    let report = residuals(&sol, nl)?;
    sol.semilinear_residual = report.semilinear;
    sol.quasilinear_residual = report.quasilinear;
    sol.semilinear_residual_fourth_order = report.semilinear_fourth_order;
    sol.quasilinear_residual_fourth_order = report.quasilinear_fourth_order;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlin::LinearSource;
    use std::f64::consts::PI;

    #[test]
    fn linear_ball_is_sinc() {
        let problem = RadialProblemSpec {
            domain: RadialDomain::Ball { radius: PI },
            dim: 3,
            target_nodes: 0,
        };
        let controls = RadialControls {
            grid_intervals: 2000,
            ..Default::default()
        };
        let sol = solve_radial(&problem, &LinearSource { lambda: 1.0 }, &controls).unwrap();
        let alpha = sol.parameter.value();
        for (r, v) in sol.grid.iter().zip(&sol.v).skip(1) {
            assert!((v - alpha * r.sin() / r).abs() < 1e-9 * alpha);
        }
        assert!(sol.v.last().unwrap().abs() < 1e-8);
    }

    #[test]
    fn linear_ball_below_first_eigenvalue_has_no_solution() {
        // h = λv with λ < λ₁ never crosses: the bracket cannot close
        let problem = RadialProblemSpec {
            domain: RadialDomain::Ball { radius: 1.0 },
            dim: 3,
            target_nodes: 0,
        };
        let controls = RadialControls {
            grid_intervals: 100,
            max_bisections: 20,
            ..Default::default()
        };
        let err = solve_radial(&problem, &LinearSource { lambda: 1.0 }, &controls).unwrap_err();
        assert!(err.is_numerical());
    }
}
