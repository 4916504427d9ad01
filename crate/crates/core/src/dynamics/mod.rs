//! Hamiltonian assembly and time propagation.
//!
//! `H = −(ħ²/2m)∇² − (1/mħ)η·L + V_L⋆ + K`, with the non-local part `K`
//! evaluated by quadrature, as a momentum multiplier, or through its
//! gradient expansion. Real time uses matrix-free Crank-Nicolson (or Strang
//! splitting when `H` allows it); imaginary time uses renormalized descent.

mod ground;
mod hamiltonian;
mod propagator;

pub use ground::{ground_state, project_sector, GroundState, GroundStateOptions};
pub use hamiltonian::{
    apply_hamiltonian, fl_expansion_error, fl_nc_coefficients, Hamiltonian, HamiltonianSpec,
    HamiltonianTerms, NonlocalPath,
};
pub use propagator::{
    step, Propagator, PropagatorConfig, Scheme, TimeMode, DEFAULT_MAX_ITERS, DEFAULT_SOLVER_TOL,
};
