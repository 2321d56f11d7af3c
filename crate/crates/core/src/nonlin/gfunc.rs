//! The change-of-variable function g solving g' = 1/√(a(g)), g(0) = 0.

use serde::Serialize;

use super::spec::{Diffusion, NonlinearitySpec};
use crate::error::{invalid, Error, Result};
use crate::format;
use crate::ode::{integrate_to_nodes, OdeOptions};

/// Default half-width of the tabulation interval.
pub const DEFAULT_S_MAX: f64 = 20.0;
/// Largest admissible node spacing.
pub const MAX_NODE_SPACING: f64 = 1e-2;
const NODE_SPACING: f64 = 1.0 / 128.0;

/// Tabulated strictly increasing, odd solution of the Cauchy problem on
/// [−s_max, s_max], with exact slopes at the nodes and monotone cubic
/// Hermite interpolation in between.
#[derive(Debug, Clone, Serialize)]
pub struct GFunction {
    diffusion: Diffusion,
    s_max: f64,
    spacing: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

pub(crate) fn diffusion_value(d: Diffusion, t: f64) -> f64 {
    match d {
        Diffusion::Power { k } => 1.0 + t.abs().powf(k),
        Diffusion::Constant { c } => c,
    }
}

/// Builds g for `spec` on [−s_max, s_max] with per-step tolerance `ode_tol`.
pub fn solve_g(spec: &NonlinearitySpec, s_max: f64, ode_tol: f64) -> Result<GFunction> {
    if !(s_max > 0.0 && s_max.is_finite()) {
        return invalid(format!("s_max must be positive and finite, got {s_max}"));
    }
    if !(ode_tol > 0.0) {
        return invalid(format!("ode_tol must be positive, got {ode_tol}"));
    }
    let n = (s_max / NODE_SPACING).ceil().max(1.0) as usize;
    let spacing = s_max / n as f64;
    let diffusion = spec.diffusion;

    let positive_nodes: Vec<f64> = (1..=n).map(|i| i as f64 * spacing).collect();
    let positive_values: Vec<f64> = match diffusion {
        Diffusion::Constant { c } => positive_nodes.iter().map(|s| s / c.sqrt()).collect(),
        Diffusion::Power { .. } => {
            let states = integrate_to_nodes(
                |s, y: &[f64; 1]| {
                    let a = diffusion_value(diffusion, y[0]);
                    if !a.is_finite() || a <= 0.0 {
                        return Err(Error::Integration {
                            at: s,
                            reason: format!("a(g) = {a} is not a positive finite number"),
                        });
                    }
                    Ok([1.0 / a.sqrt()])
                },
                0.0,
                [0.0],
                &positive_nodes,
                &OdeOptions::with_tol(ode_tol),
                |_, _| true,
            )?;
            states.into_iter().map(|y| y[0]).collect()
        }
    };

    let total = 2 * n + 1;
    let mut nodes = Vec::with_capacity(total);
    let mut values = Vec::with_capacity(total);
    for i in (0..n).rev() {
        nodes.push(-positive_nodes[i]);
        values.push(-positive_values[i]);
    }
    nodes.push(0.0);
    values.push(0.0);
    nodes.extend_from_slice(&positive_nodes);
    values.extend_from_slice(&positive_values);
    let derivs = values
        .iter()
        .map(|g| 1.0 / diffusion_value(diffusion, *g).sqrt())
        .collect();

    let gf = GFunction {
        diffusion,
        s_max: nodes[total - 1],
        spacing,
        nodes,
        values,
        derivs,
    };
    if gf.values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Integration {
            at: s_max,
            reason: "tabulated g is not strictly increasing".into(),
        });
    }
    Ok(gf)
}

impl GFunction {
    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Largest |u| accepted by [`g_inverse`].
    pub fn range(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn check_s(&self, s: f64) -> Result<()> {
        if s.is_nan() || s.abs() > self.s_max * (1.0 + 1e-14) {
            return Err(Error::OutOfRange {
                value: s,
                lo: -self.s_max,
                hi: self.s_max,
            });
        }
        Ok(())
    }

    fn cell(&self, s: f64) -> usize {
        let n_cells = self.nodes.len() - 1;
        let pos = (s + self.s_max) / self.spacing;
        (pos.floor().max(0.0) as usize).min(n_cells - 1)
    }

    /// Cubic Hermite on cell `i`, slopes limited (Fritsch–Carlson) to keep monotonicity.
    fn hermite(&self, i: usize, s: f64) -> (f64, f64) {
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (mut m0, mut m1) = (self.derivs[i], self.derivs[i + 1]);
        let hx = x1 - x0;
        let delta = (y1 - y0) / hx;
        let a = m0 / delta;
        let b = m1 / delta;
        let r2 = a * a + b * b;
        if r2 > 9.0 {
            let tau = 3.0 / r2.sqrt();
            m0 = tau * a * delta;
            m1 = tau * b * delta;
        }
        let t = (s - x0) / hx;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let value = h00 * y0 + h10 * hx * m0 + h01 * y1 + h11 * hx * m1;
        let d00 = (6.0 * t2 - 6.0 * t) / hx;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / hx;
        let d11 = 3.0 * t2 - 2.0 * t;
        let slope = d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1;
        (value, slope)
    }

    /// g(s); errors outside the tabulated interval (no extrapolation).
    /// Evaluated on |s| so that g(−s) = −g(s) bit for bit.
    pub fn eval(&self, s: f64) -> Result<f64> {
        self.check_s(s)?;
        if let Diffusion::Constant { c } = self.diffusion {
            return Ok(s / c.sqrt());
        }
        let m = s.abs();
        let (v, _) = self.hermite(self.cell(m), m);
        Ok(v.copysign(s))
    }

    /// g'(s) = 1/√(a(g(s))).
    pub fn deriv(&self, s: f64) -> Result<f64> {
        let g = self.eval(s)?;
        Ok(1.0 / diffusion_value(self.diffusion, g).sqrt())
    }

    /// CSV with header `s,g,gprime`, one row per node.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,g,gprime\n");
        for i in 0..self.nodes.len() {
            out.push_str(&format::csv_row(&[
                self.nodes[i],
                self.values[i],
                self.derivs[i],
            ]));
        }
        out
    }
}

/// s with g(s) = u.
pub fn g_inverse(g: &GFunction, u: f64) -> Result<f64> {
    let range = g.range();
    if u.is_nan() || u.abs() > range {
        return Err(Error::OutOfRange {
            value: u,
            lo: -range,
            hi: range,
        });
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    if let Diffusion::Constant { c } = g.diffusion {
        return Ok(u * c.sqrt());
    }
    // cell containing u
    let i = match g.values.binary_search_by(|v| v.partial_cmp(&u).unwrap()) {
        Ok(j) => return Ok(g.nodes[j]),
        Err(j) => j.clamp(1, g.values.len() - 1) - 1,
    };
    let (mut lo, mut hi) = (g.nodes[i], g.nodes[i + 1]);
    let mut s = lo + (hi - lo) * (u - g.values[i]) / (g.values[i + 1] - g.values[i]);
    for _ in 0..100 {
        let (val, slope) = g.hermite(i, s);
        let r = val - u;
        if r == 0.0 {
            break;
        }
        if r > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let mut next = s - r / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - s).abs() <= 4.0 * f64::EPSILON * s.abs().max(1e-300) {
            s = next;
            break;
        }
        s = next;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// s as a function of g for k = 2: ∫₀ᵍ √(1+t²) dt.
    fn k2_oracle(g: f64) -> f64 {
        0.5 * (g * (1.0 + g * g).sqrt() + g.asinh())
    }

    fn k2() -> GFunction {
        let spec = NonlinearitySpec::power(2.0, 3.0, 3).unwrap();
        solve_g(&spec, DEFAULT_S_MAX, 1e-12).unwrap()
    }

    #[test]
    fn identity_for_unit_constant_diffusion() {
        let spec = NonlinearitySpec::constant_diffusion(1.0, 3.0, 3).unwrap();
        let g = solve_g(&spec, 5.0, 1e-10).unwrap();
        for (s, v) in g.nodes().iter().zip(g.values()) {
            assert_eq!(s, v);
        }
        assert_eq!(g_inverse(&g, 2.0).unwrap(), 2.0);
    }

    #[test]
    fn constant_four_halves() {
        let spec = NonlinearitySpec::constant_diffusion(4.0, 3.0, 3).unwrap();
        let g = solve_g(&spec, 5.0, 1e-10).unwrap();
        assert_eq!(g.eval(1.0).unwrap(), 0.5);
    }

    #[test]
    fn k2_matches_implicit_closed_form() {
        let g = k2();
        // oracle evaluated at g = 1
        let s_at_one = k2_oracle(1.0);
        assert!((s_at_one - 1.147793).abs() < 1e-6);
        assert!((g.eval(s_at_one).unwrap() - 1.0).abs() < 1e-9);
        assert!((g_inverse(&g, 1.0).unwrap() - 1.147793).abs() < 1e-6);
        assert!((g_inverse(&g, 1.0).unwrap() - s_at_one).abs() < 1e-9);
    }

    #[test]
    fn odd_and_monotone() {
        let g = k2();
        let n = g.nodes().len();
        assert_eq!(g.values()[n / 2], 0.0);
        for i in 0..n {
            assert_eq!(g.values()[i], -g.values()[n - 1 - i]);
        }
        assert!(g.values().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn out_of_range_is_explicit() {
        let g = k2();
        assert!(matches!(g.eval(20.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(
            g_inverse(&g, g.range() * 1.01),
            Err(Error::OutOfRange { .. })
        ));
        assert_eq!(g_inverse(&g, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn node_spacing_within_limit() {
        assert!(k2().spacing() <= MAX_NODE_SPACING);
    }
}
