//! Quasi-linear to semi-linear change of variable, convexity certificates for
//! the transformed nonlinearity, and numerical symmetry / Morse-index /
//! nodal-domain diagnostics on balls, annuli and x₁-symmetric rectangles.

pub mod convexity;
pub mod error;
pub mod format;
pub mod linalg;
pub mod nonlin;
pub mod planar;
pub mod ode;
pub mod radial;
pub mod report;

pub use error::{Error, Result};
