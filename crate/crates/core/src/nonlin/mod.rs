//! The change of variable g, the transformed nonlinearity h and growth checks.

mod bundle;
mod gfunc;
mod growth;
mod spec;

pub use bundle::{DerivativeBundle, LinearSource, Nonlinearity, QuasiTerms};
pub use gfunc::{g_inverse, solve_g, GFunction, DEFAULT_S_MAX, MAX_NODE_SPACING};
pub use growth::{critical_bound, validate_growth, SubcriticalityReport};
pub use spec::{Diffusion, NonlinearitySpec, SourceKind, Weight};

/// Builds g on the default interval and wraps it with `spec`.
pub fn bundle_for(spec: NonlinearitySpec, s_max: f64, ode_tol: f64) -> crate::Result<DerivativeBundle> {
    let g = solve_g(&spec, s_max, ode_tol)?;
    Ok(DerivativeBundle::new(spec, g))
}
