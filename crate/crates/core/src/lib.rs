//! Grid simulator for quantum wavefunctions under local and Gaussian
//! non-local potentials with first-order non-commutative phase-space
//! corrections, plus continuity-equation diagnostics and Poisson-corrected
//! currents.

pub mod conservation;
pub mod dynamics;
mod error;
pub mod fieldlab;
mod linalg;
pub mod ncalgebra;
pub mod potentials;
pub mod scenario;

pub use error::{Error, Result};
pub use fieldlab::{Boundary, ComplexField, Grid, RealField, VectorField};
pub use num_complex::Complex64;
