//! Small dense-structure solvers used by the radial and planar modules.

pub mod banded;
pub mod tridiag;

pub use banded::{BandedLu, BandedMatrix};
pub use tridiag::SymTridiagonal;
