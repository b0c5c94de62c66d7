//! Finite-dimensional linear algebra, uniform grids and quadrature.

mod fit;
mod grid;
mod matrix;
mod quad;
mod vector;

pub use fit::{fit_line, LineFit};
pub(crate) use grid::steps_in;
pub use grid::Grid;
pub use matrix::{matexp, Lu, Matrix};
pub use quad::{quad, quad_scalar};
pub use vector::{BlockNorm, NormTag, StateVector};
