use serde::Serialize;

use super::solution::RadialSolution;
use crate::error::Result;
use crate::nonlin::{Nonlinearity, QuasiTerms};

/// Max-norm finite-difference residuals of the two equivalent forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    /// −v″ − (N−1)/r·v′ − h(r, v)
    pub semilinear: f64,
    /// −r^{1−N}(r^{N−1}a(u)u′)′ + ½a′(u)u′² − f(r, u)
    pub quasilinear: f64,
    /// Semi-linear residual with fourth-order stencils; far below the
    /// second-order one on fine grids, where that one is limited by roundoff.
    pub semilinear_fourth_order: f64,
    /// Quasi-linear residual in the expanded form −a(u)Δu − ½a′(u)u′² − f.
    pub quasilinear_fourth_order: f64,
    pub grid_points: usize,
}

/// Second-order residuals at every node where the stencil fits: interior
/// nodes, plus the ball center for the semi-linear form (via v′(0) = 0).
pub fn residuals(sol: &RadialSolution, nl: &dyn Nonlinearity) -> Result<ResidualReport> {
    let r = &sol.grid;
    let (v, u) = (&sol.v, &sol.u);
    let m = r.len() - 1;
    let h = sol.spacing();
    let n = sol.dim as f64;

    let mut semi = 0.0f64;
    if sol.domain.is_ball() {
        let lap = 2.0 * n * (v[1] - v[0]) / (h * h);
        semi = (-lap - nl.h(&[0.0], v[0])?).abs();
    }
    for i in 1..m {
        let d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
        let d1 = (v[i + 1] - v[i - 1]) / (2.0 * h);
        let res = -d2 - (n - 1.0) / r[i] * d1 - nl.h(&[r[i]], v[i])?;
        semi = semi.max(res.abs());
    }

    let terms = u
        .iter()
        .zip(r)
        .map(|(&ui, &ri)| nl.quasi_terms(&[ri], ui))
        .collect::<Result<Vec<_>>>()?;
    let mut quasi = 0.0f64;
    for i in 1..m {
        let rp = 0.5 * (r[i] + r[i + 1]);
        let rm = 0.5 * (r[i] + r[i - 1]);
        let flux_p = rp.powf(n - 1.0) * 0.5 * (terms[i].a + terms[i + 1].a) * (u[i + 1] - u[i]) / h;
        let flux_m = rm.powf(n - 1.0) * 0.5 * (terms[i].a + terms[i - 1].a) * (u[i] - u[i - 1]) / h;
        // exact shell volume; h·r^{N−1} loses consistency next to the origin
        let volume = (rp.powf(n) - rm.powf(n)) / n;
        let div = (flux_p - flux_m) / volume;
        let du = (u[i + 1] - u[i - 1]) / (2.0 * h);
        let res = -div + 0.5 * terms[i].da * du * du - terms[i].f;
        quasi = quasi.max(res.abs());
    }
    Ok(ResidualReport {
        semilinear: semi,
        quasilinear: quasi,
        semilinear_fourth_order: semilinear_fourth_order(sol, nl)?,
        quasilinear_fourth_order: quasilinear_fourth_order(sol, &terms)?,
        grid_points: m + 1,
    })
}

/// Fourth-order derivatives at node i: centered where possible, the even
/// extension next to a ball center, one-sided six-point formulas elsewhere.
fn derivatives4(v: &[f64], i: usize, h: f64, ball: bool) -> (f64, f64) {
    let m = v.len() - 1;
    let at = |j: isize| -> f64 {
        if j < 0 {
            v[(-j) as usize]
        } else {
            v[j as usize]
        }
    };
    let j = i as isize;
    if (i >= 2 || ball) && i + 2 <= m {
        let d2 = (-at(j + 2) + 16.0 * at(j + 1) - 30.0 * at(j) + 16.0 * at(j - 1) - at(j - 2)) / (12.0 * h * h);
        let d1 = (-at(j + 2) + 8.0 * at(j + 1) - 8.0 * at(j - 1) + at(j - 2)) / (12.0 * h);
        return (d1, d2);
    }
    // one-sided: node 1 from the left end, node m-1 from the right end
    let (base, dir) = if i == 1 { (0isize, 1.0) } else { (m as isize, -1.0) };
    let w = |q: isize| at(base + (dir as isize) * q);
    let d2 = (10.0 * w(0) - 15.0 * w(1) - 4.0 * w(2) + 14.0 * w(3) - 6.0 * w(4) + w(5)) / (12.0 * h * h);
    let d1 = dir * (-3.0 * w(0) - 10.0 * w(1) + 18.0 * w(2) - 6.0 * w(3) + w(4)) / (12.0 * h);
    (d1, d2)
}

fn semilinear_fourth_order(sol: &RadialSolution, nl: &dyn Nonlinearity) -> Result<f64> {
    let (r, v) = (&sol.grid, &sol.v);
    let m = r.len() - 1;
    let h = sol.spacing();
    let n = sol.dim as f64;
    let ball = sol.domain.is_ball();
    let mut worst = 0.0f64;
    if ball {
        let (_, d2) = derivatives4(v, 0, h, true);
        worst = (-n * d2 - nl.h(&[0.0], v[0])?).abs();
    }
    if m < 6 {
        return Ok(f64::NAN);
    }
    for i in 1..m {
        let (d1, d2) = derivatives4(v, i, h, ball);
        let res = -d2 - (n - 1.0) / r[i] * d1 - nl.h(&[r[i]], v[i])?;
        worst = worst.max(res.abs());
    }
    Ok(worst)
}

fn quasilinear_fourth_order(sol: &RadialSolution, terms: &[QuasiTerms]) -> Result<f64> {
    let (r, u) = (&sol.grid, &sol.u);
    let m = r.len() - 1;
    if m < 6 {
        return Ok(f64::NAN);
    }
    let h = sol.spacing();
    let n = sol.dim as f64;
    let ball = sol.domain.is_ball();
    let mut worst = 0.0f64;
    if ball {
        let (_, d2) = derivatives4(u, 0, h, true);
        worst = (-terms[0].a * n * d2 - terms[0].f).abs();
    }
    for i in 1..m {
        let (d1, d2) = derivatives4(u, i, h, ball);
        let t = &terms[i];
        let res = -t.a * (d2 + (n - 1.0) / r[i] * d1) - 0.5 * t.da * d1 * d1 - t.f;
        worst = worst.max(res.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlin::LinearSource;
    use crate::radial::{RadialDomain, ShootingParameter};
    use std::f64::consts::PI;

    fn sampled(m: usize, f: impl Fn(f64) -> f64) -> RadialSolution {
        let grid: Vec<f64> = (0..=m).map(|i| PI * i as f64 / m as f64).collect();
        let v: Vec<f64> = grid.iter().map(|&r| f(r)).collect();
        RadialSolution {
            domain: RadialDomain::Ball { radius: PI },
            dim: 3,
            u: v.clone(),
            dv: vec![0.0; m + 1],
            v,
            grid,
            parameter: ShootingParameter::CenterValue(1.0),
            interior_zeros: 0,
            semilinear_residual: f64::NAN,
            quasilinear_residual: f64::NAN,
            semilinear_residual_fourth_order: f64::NAN,
            quasilinear_residual_fourth_order: f64::NAN,
        }
    }

    #[test]
    fn exact_sinc_has_small_residual() {
        let sol = sampled(10_000, |r| if r == 0.0 { 1.0 } else { r.sin() / r });
        let rep = residuals(&sol, &LinearSource { lambda: 1.0 }).unwrap();
        // the second-order stencil sits at its roundoff floor here
        assert!(rep.semilinear <= 2e-8, "{}", rep.semilinear);
        assert!(rep.semilinear_fourth_order <= 1e-8, "{}", rep.semilinear_fourth_order);
        let coarse = residuals(&sampled(2000, |r| if r == 0.0 { 1.0 } else { r.sin() / r }), &LinearSource { lambda: 1.0 }).unwrap();
        assert!(coarse.semilinear_fourth_order <= 1e-9, "{}", coarse.semilinear_fourth_order);
    }

    #[test]
    fn orders_under_refinement() {
        let f = |r: f64| if r == 0.0 { 1.0 } else { r.sin() / r };
        let nl = LinearSource { lambda: 1.0 };
        let coarse = residuals(&sampled(100, f), &nl).unwrap();
        let fine = residuals(&sampled(200, f), &nl).unwrap();
        let r2 = coarse.semilinear / fine.semilinear;
        let r4 = coarse.semilinear_fourth_order / fine.semilinear_fourth_order;
        assert!((3.5..4.5).contains(&r2), "{r2}");
        assert!(r4 > 12.0, "{r4}");
    }

    #[test]
    fn zero_profile_has_zero_residual() {
        let sol = sampled(50, |_| 0.0);
        let rep = residuals(&sol, &LinearSource { lambda: 3.0 }).unwrap();
        assert_eq!(rep.semilinear, 0.0);
        assert_eq!(rep.quasilinear, 0.0);
    }
}
