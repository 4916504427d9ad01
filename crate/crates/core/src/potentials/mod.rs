//! Local potentials and non-local kernels.
//!
//! The Gaussian (Frahn-Lemmer) kernel can be applied two ways: by direct
//! quadrature over the grid, or as the multiplier `V₀ exp(−k²β²/4)` in
//! momentum space. Both paths agree for resolved ranges.

mod dispersion;
mod local;
mod nonlocal;

pub use dispersion::{dispersion_k_max, dispersion_residual, dispersion_solve};
pub use local::{eval_local, LocalPotential, LocalPotentialSpec};
pub use nonlocal::{
    apply_nonlocal, apply_nonlocal_momentum, check_resolution, frahn_lemmer_eval,
    kernel_normalization, momentum_multiplier, NonlocalKernelSpec, NonlocalOperator,
};
