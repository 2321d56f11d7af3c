use serde::Serialize;

use super::problem::RadialDomain;
use crate::error::{Error, Result};
use crate::format;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum ShootingParameter {
    /// v(0) on a ball.
    CenterValue(f64),
    /// v'(R₀) on an annulus.
    InnerSlope(f64),
}

impl ShootingParameter {
    pub fn value(&self) -> f64 {
        match *self {
            ShootingParameter::CenterValue(a) | ShootingParameter::InnerSlope(a) => a,
        }
    }
}

/// A radial profile v of the semi-linear problem and u = g(v), on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub domain: RadialDomain,
    pub dim: usize,
    pub grid: Vec<f64>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub dv: Vec<f64>,
    pub parameter: ShootingParameter,
    pub interior_zeros: usize,
    /// Max-norm second-order finite-difference residuals.
    pub semilinear_residual: f64,
    pub quasilinear_residual: f64,
    /// Same with fourth-order stencils.
    pub semilinear_residual_fourth_order: f64,
    pub quasilinear_residual_fourth_order: f64,
}

/// Sign changes along a sequence, skipping exact zeros.
pub fn sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

impl RadialSolution {
    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Interior sign changes of a profile sampled on this grid (boundary nodes excluded).
    pub fn interior_sign_changes(&self, values: &[f64]) -> usize {
        let n = values.len();
        let start = match self.domain {
            RadialDomain::Ball { .. } => 0,
            RadialDomain::Annulus { .. } => 1,
        };
        sign_changes(&values[start..n - 1])
    }

    /// Cubic Hermite interpolation of v at radius r using the stored slopes.
    pub fn v_at(&self, r: f64) -> f64 {
        let n = self.grid.len();
        let h = self.spacing();
        let pos = ((r - self.grid[0]) / h).floor();
        let i = (pos.max(0.0) as usize).min(n - 2);
        let t = (r - self.grid[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.v[i]
            + (t3 - 2.0 * t2 + t) * h * self.dv[i]
            + (-2.0 * t3 + 3.0 * t2) * self.v[i + 1]
            + (t3 - t2) * h * self.dv[i + 1]
    }

    pub fn argmax(values: &[f64]) -> usize {
        values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc })
            .0
    }

    /// `# radial ...` descriptor followed by the `r,v,u,dv` table. `extra`
    /// key/value pairs are appended to the descriptor.
    pub fn to_csv(&self, extra: &[(String, String)]) -> String {
        let mut head = format!("# radial {} N={} nodes={} ", self.domain.descriptor(), self.dim, self.interior_zeros);
        head.push_str(&match self.parameter {
            ShootingParameter::CenterValue(a) => format!("alpha={}", format::num(a)),
            ShootingParameter::InnerSlope(b) => format!("beta={}", format::num(b)),
        });
        for (k, v) in extra {
            head.push_str(&format!(" {k}={v}"));
        }
        head.push('\n');
        let mut out = head;
        out.push_str("r,v,u,dv\n");
        for i in 0..self.grid.len() {
            out.push_str(&format::csv_row(&[self.grid[i], self.v[i], self.u[i], self.dv[i]]));
        }
        out
    }

    /// Parses a file written by [`RadialSolution::to_csv`]; returns the descriptor pairs too.
    /// Residual fields are left at NaN until recomputed.
    pub fn from_csv(text: &str) -> Result<(Self, Vec<(String, String)>)> {
        let (comments, rows) = format::read_numeric_csv(text, "r,v,u,dv")?;
        let desc_line = comments
            .iter()
            .find(|c| c.trim_start_matches('#').trim_start().starts_with("radial"))
            .ok_or_else(|| Error::Parse("missing `# radial ...` descriptor line".into()))?;
        let pairs = format::parse_descriptor(desc_line);
        let get = |key: &str| -> Result<f64> {
            let raw = format::descriptor_value(&pairs, key)
                .ok_or_else(|| Error::Parse(format!("descriptor lacks `{key}`")))?;
            format::parse_f64(raw, 1)
        };
        let domain = match format::descriptor_value(&pairs, "domain") {
            Some("ball") => RadialDomain::Ball { radius: get("R")? },
            Some("annulus") => RadialDomain::Annulus {
                inner: get("R0")?,
                outer: get("R1")?,
            },
            other => return Err(Error::Parse(format!("unknown radial domain {other:?}"))),
        };
        let dim = get("N")? as usize;
        let parameter = if let Some(a) = format::descriptor_value(&pairs, "alpha") {
            ShootingParameter::CenterValue(format::parse_f64(a, 1)?)
        } else {
            ShootingParameter::InnerSlope(get("beta")?)
        };
        if rows.len() < 5 {
            return Err(Error::Parse(format!("radial solution needs at least 5 rows, found {}", rows.len())));
        }
        let mut sol = RadialSolution {
            domain,
            dim,
            grid: rows.iter().map(|r| r[0]).collect(),
            v: rows.iter().map(|r| r[1]).collect(),
            u: rows.iter().map(|r| r[2]).collect(),
            dv: rows.iter().map(|r| r[3]).collect(),
            parameter,
            interior_zeros: 0,
            semilinear_residual: f64::NAN,
            quasilinear_residual: f64::NAN,
            semilinear_residual_fourth_order: f64::NAN,
            quasilinear_residual_fourth_order: f64::NAN,
        };
        sol.interior_zeros = sol.interior_sign_changes(&sol.v);
        Ok((sol, pairs))
    }
}
