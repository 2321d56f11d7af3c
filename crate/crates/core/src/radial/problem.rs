use serde::Serialize;

use crate::error::{invalid, Result};
use crate::format;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadialDomain {
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

impl RadialDomain {
    pub fn inner(&self) -> f64 {
        match *self {
            RadialDomain::Ball { .. } => 0.0,
            RadialDomain::Annulus { inner, .. } => inner,
        }
    }

    pub fn outer(&self) -> f64 {
        match *self {
            RadialDomain::Ball { radius } => radius,
            RadialDomain::Annulus { outer, .. } => outer,
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self, RadialDomain::Ball { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RadialDomain::Ball { radius } if !(radius > 0.0 && radius.is_finite()) => {
                invalid(format!("ball radius must be positive, got {radius}"))
            }
            RadialDomain::Annulus { inner, outer } if !(inner > 0.0 && outer > inner && outer.is_finite()) => {
                invalid(format!("annulus radii must satisfy 0 < R0 < R1, got ({inner}, {outer})"))
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn descriptor(&self) -> String {
        match *self {
            RadialDomain::Ball { radius } => format!("domain=ball R={}", format::num(radius)),
            RadialDomain::Annulus { inner, outer } => format!(
                "domain=annulus R0={} R1={}",
                format::num(inner),
                format::num(outer)
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialProblemSpec {
    pub domain: RadialDomain,
    pub dim: usize,
    /// Desired number of interior zeros of v (0 for positive solutions).
    pub target_nodes: usize,
}

impl RadialProblemSpec {
    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        if self.dim < 2 {
            return invalid(format!("dimension must be at least 2, got {}", self.dim));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialControls {
    pub ode_tol: f64,
    pub bc_tol: f64,
    pub max_bisections: usize,
    /// Number of grid intervals M; the grid has M + 1 radii.
    pub grid_intervals: usize,
    /// First trial value of the shooting parameter.
    pub initial_parameter: f64,
}

impl Default for RadialControls {
    fn default() -> Self {
        Self {
            ode_tol: 1e-12,
            bc_tol: 1e-9,
            max_bisections: 200,
            grid_intervals: 4000,
            initial_parameter: 1.0,
        }
    }
}

impl RadialControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.ode_tol > 0.0 && self.bc_tol > 0.0) {
            return invalid("tolerances must be positive");
        }
        if self.grid_intervals < 4 {
            return invalid(format!("grid needs at least 5 points, got {}", self.grid_intervals + 1));
        }
        if !(self.initial_parameter > 0.0 && self.initial_parameter.is_finite()) {
            return invalid("initial shooting parameter must be positive");
        }
        Ok(())
    }
}
