use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::format;
use crate::nonlin::{validate_growth, NonlinearitySpec};

/// The rectangle (−L, L) × (0, H) with n₁ × n₂ mesh intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarProblemSpec {
    pub half_width: f64,
    pub height: f64,
    /// Intervals along x₁; must be even so the mesh contains the line x₁ = 0.
    pub n1: usize,
    pub n2: usize,
}

impl PlanarProblemSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.height > 0.0 && self.half_width.is_finite() && self.height.is_finite()) {
            return invalid(format!(
                "rectangle sides must be positive, got L={} H={}",
                self.half_width, self.height
            ));
        }
        if self.n1 < 4 || self.n1 % 2 != 0 {
            return invalid(format!("n1 must be even and at least 4, got {}", self.n1));
        }
        if self.n2 < 2 {
            return invalid(format!("n2 must be at least 2, got {}", self.n2));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n1 as f64
    }

    pub fn dy(&self) -> f64 {
        self.height / self.n2 as f64
    }

    /// x₁ of column i, symmetric about i = n₁/2 bit for bit.
    pub fn x1(&self, i: usize) -> f64 {
        (i as f64 - (self.n1 / 2) as f64) * self.dx()
    }

    pub fn x2(&self, j: usize) -> f64 {
        j as f64 * self.dy()
    }

    /// Index into a full-grid array (boundary included), x₂ fastest.
    pub fn node(&self, i: usize, j: usize) -> usize {
        i * (self.n2 + 1) + j
    }

    pub fn node_count(&self) -> usize {
        (self.n1 + 1) * (self.n2 + 1)
    }

    pub fn mirror(&self, i: usize) -> usize {
        self.n1 - i
    }
}

/// Hypotheses of the symmetry theorem that the spec does not meet.
pub fn planar_warnings(spec: &NonlinearitySpec) -> Vec<String> {
    let mut out = Vec::new();
    let growth = validate_growth(spec);
    if growth.k > 0.0 && !growth.p_gt_k_plus_1 {
        out.push(format!(
            "p = {} does not exceed k + 1 = {}; convexity of h is not guaranteed",
            spec.p,
            growth.k + 1.0
        ));
    }
    if !spec.psi.is_even_in_x1() {
        out.push("weight is not even in x1".into());
    }
    if !spec.psi.is_monotone_in_x1() {
        out.push("weight is not nondecreasing in x1 on {x1 < 0}".into());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarControls {
    /// Max-norm tolerance on the discrete residual.
    pub tol: f64,
    pub max_iterations: usize,
    /// Relative x₁-tilt of the initial bump, to start away from symmetry.
    pub seed_tilt: f64,
}

impl Default for PlanarControls {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iterations: 60,
            seed_tilt: 0.3,
        }
    }
}

impl PlanarControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return invalid("planar tolerance must be positive");
        }
        if self.max_iterations == 0 {
            return invalid("max_iterations must be positive");
        }
        if !(self.seed_tilt.abs() < 1.0) {
            return invalid(format!("seed tilt must lie in (-1, 1), got {}", self.seed_tilt));
        }
        Ok(())
    }
}

/// Discrete solution v and u = g(v) on the full mesh, boundary included.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarField {
    pub problem: PlanarProblemSpec,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Newton settled on v ≡ 0.
    pub trivial: bool,
    pub seeds_tried: usize,
    pub warnings: Vec<String>,
}

impl PlanarField {
    pub fn max_abs_u(&self) -> f64 {
        self.u.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// `# mesh ...` descriptor, then `x1,x2,v,u` rows with x₂ running fastest.
    pub fn to_csv(&self, extra: &[(String, String)]) -> String {
        let p = &self.problem;
        let mut out = format!(
            "# mesh L={} H={} n1={} n2={} residual={} converged={} trivial={}",
            format::num(p.half_width),
            format::num(p.height),
            p.n1,
            p.n2,
            format::num(self.residual),
            self.converged,
            self.trivial
        );
        for (k, v) in extra {
            out.push_str(&format!(" {k}={v}"));
        }
        out.push('\n');
        out.push_str("x1,x2,v,u\n");
        for i in 0..=p.n1 {
            for j in 0..=p.n2 {
                let k = p.node(i, j);
                out.push_str(&format::csv_row(&[p.x1(i), p.x2(j), self.v[k], self.u[k]]));
            }
        }
        out
    }

    /// Reads a file written by [`PlanarField::to_csv`]. The residual is taken
    /// from the descriptor; callers re-evaluate it against their nonlinearity.
    pub fn from_csv(text: &str) -> Result<(Self, Vec<(String, String)>)> {
        let (comments, rows) = format::read_numeric_csv(text, "x1,x2,v,u")?;
        let line = comments
            .iter()
            .find(|c| c.trim_start_matches('#').trim_start().starts_with("mesh"))
            .ok_or_else(|| Error::Parse("missing `# mesh ...` descriptor line".into()))?;
        let pairs = format::parse_descriptor(line);
        let get = |key: &str| -> Result<&str> {
            format::descriptor_value(&pairs, key).ok_or_else(|| Error::Parse(format!("mesh descriptor lacks `{key}`")))
        };
        let int = |key: &str| -> Result<usize> {
            get(key)?
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("mesh descriptor `{key}` is not a count")))
        };
        let problem = PlanarProblemSpec {
            half_width: format::parse_f64(get("L")?, 1)?,
            height: format::parse_f64(get("H")?, 1)?,
            n1: int("n1")?,
            n2: int("n2")?,
        };
        problem.validate().map_err(|e| Error::Parse(e.to_string()))?;
        if rows.len() != problem.node_count() {
            return Err(Error::Parse(format!(
                "mesh {}x{} needs {} rows, found {}",
                problem.n1,
                problem.n2,
                problem.node_count(),
                rows.len()
            )));
        }
        let flag = |key: &str| format::descriptor_value(&pairs, key) == Some("true");
        let residual = match format::descriptor_value(&pairs, "residual") {
            Some(r) => format::parse_f64(r, 1)?,
            None => f64::NAN,
        };
        let field = PlanarField {
            problem,
            v: rows.iter().map(|r| r[2]).collect(),
            u: rows.iter().map(|r| r[3]).collect(),
            residual,
            residual_history: Vec::new(),
            iterations: 0,
            converged: flag("converged"),
            trivial: flag("trivial"),
            seeds_tried: 0,
            warnings: Vec::new(),
        };
        Ok((field, pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_is_mirror_symmetric() {
        let p = PlanarProblemSpec {
            half_width: 0.7,
            height: 1.3,
            n1: 10,
            n2: 3,
        };
        for i in 0..=p.n1 {
            assert_eq!(p.x1(i), -p.x1(p.mirror(i)));
        }
        assert_eq!(p.x1(5), 0.0);
    }

    #[test]
    fn odd_n1_rejected() {
        let p = PlanarProblemSpec {
            half_width: 1.0,
            height: 1.0,
            n1: 9,
            n2: 4,
        };
        assert!(p.validate().is_err());
    }
}
