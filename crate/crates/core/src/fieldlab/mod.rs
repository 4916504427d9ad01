//! Uniform-grid field substrate: grids, complex/real/vector fields,
//! derivative operators, momentum transforms, quadrature and CSV dumps.
//!
//! Derivatives are spectral on periodic grids and second-order central
//! differences on dirichlet-zero grids. The momentum transform is the
//! unitary DFT and exists only for periodic grids.

mod field;
mod grid;
pub mod io;
pub(crate) mod spectral;

pub use field::{ComplexField, RealField, VectorField};
pub use grid::{Boundary, Grid, MAX_DIM};
