//! Non-commutative phase-space corrections at first order.
//!
//! Both parameter vectors enter through antisymmetric matrices built as
//! `M_ij = ε_ijk v_k`. Space non-commutativity acts through the first-order
//! Moyal product `f⋆g = fg + (i/2) Θ_ab ∂_a f ∂_b g`; momentum
//! non-commutativity acts through the Bopp-shifted kinetic energy
//! `(p^nc)² = p² − (2/ħ) L·η`.

use log::warn;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fieldlab::{ComplexField, Grid};
use crate::potentials::LocalPotential;

/// |ξ| above this is accepted with a warning.
pub const XI_WARN_THRESHOLD: f64 = 1e-2;

/// Upper bounds from energy-shift experiments, SI units.
pub mod presets {
    /// Θ in m².
    pub const THETA_BOUND_SI: f64 = 4e-40;
    /// η in kg² m² s⁻².
    pub const ETA_BOUND_SI: f64 = 1.76e-61;
    /// Reduced Planck constant in J·s.
    pub const HBAR_SI: f64 = 1.0546e-34;
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (2, 1, 0) | (0, 2, 1) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

fn antisymmetric(v: &[f64; 3]) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = (0..3).map(|k| levi_civita(i, j, k) * v[k]).sum();
        }
    }
    m
}

/// Non-commutativity vectors `Θ_k` (length²) and `η_k` (momentum²).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NcParams {
    theta: [f64; 3],
    eta: [f64; 3],
    hbar: f64,
}

impl NcParams {
    /// Validates the parameters: finite values, `ħ > 0` and `|ξ| < 1`.
    pub fn new(theta: [f64; 3], eta: [f64; 3], hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
        }
        if theta.iter().chain(&eta).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-commutativity parameters must be finite".into()));
        }
        let nc = Self { theta, eta, hbar };
        let xi = nc.xi();
        if xi.abs() >= 1.0 {
            return Err(Error::InconsistentParameters(format!(
                "|xi| = {:e} violates xi << 1",
                xi.abs()
            )));
        }
        if xi.abs() > XI_WARN_THRESHOLD {
            warn!("|xi| = {:e} is not small; first-order corrections may be unreliable", xi.abs());
        }
        Ok(nc)
    }

    /// Θ = η = 0.
    pub fn commutative(hbar: f64) -> Self {
        Self {
            theta: [0.0; 3],
            eta: [0.0; 3],
            hbar,
        }
    }

    /// Out-of-plane components only, for planar problems.
    pub fn planar(theta_z: f64, eta_z: f64, hbar: f64) -> Result<Self> {
        Self::new([0.0, 0.0, theta_z], [0.0, 0.0, eta_z], hbar)
    }

    pub fn theta(&self) -> [f64; 3] {
        self.theta
    }

    pub fn eta(&self) -> [f64; 3] {
        self.eta
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn theta_matrix(&self) -> [[f64; 3]; 3] {
        antisymmetric(&self.theta)
    }

    pub fn eta_matrix(&self) -> [[f64; 3]; 3] {
        antisymmetric(&self.eta)
    }

    /// `ξ = Tr(Θη)/4ħ²`, signed. With this matrix convention `Tr(Θη) = −2 Θ·η`.
    pub fn xi(&self) -> f64 {
        let t = self.theta_matrix();
        let e = self.eta_matrix();
        let mut tr = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                tr += t[i][j] * e[j][i];
            }
        }
        tr / (4.0 * self.hbar * self.hbar)
    }

    /// `ħ(1 + ξ)`.
    pub fn hbar_eff(&self) -> f64 {
        self.hbar * (1.0 + self.xi())
    }

    pub fn has_theta(&self) -> bool {
        self.theta.iter().any(|&v| v != 0.0)
    }

    pub fn has_eta(&self) -> bool {
        self.eta.iter().any(|&v| v != 0.0)
    }

    pub fn is_commutative(&self) -> bool {
        !self.has_theta() && !self.has_eta()
    }

    /// Only components whose antisymmetric matrix fits inside the grid's axes
    /// may be nonzero: none in 1D, the z components in 2D.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        let allowed = |k: usize| match dim {
            1 => false,
            2 => k == 2,
            _ => true,
        };
        for k in 0..3 {
            if self.theta[k] != 0.0 && !allowed(k) {
                return Err(Error::Domain(format!(
                    "theta component {k} is not representable on a {dim}-dimensional grid"
                )));
            }
            if self.eta[k] != 0.0 && !allowed(k) {
                return Err(Error::Domain(format!(
                    "eta component {k} is not representable on a {dim}-dimensional grid"
                )));
            }
        }
        Ok(())
    }
}

/// Validated parameter set; see [`NcParams::new`].
pub fn validate_nc_params(theta: [f64; 3], eta: [f64; 3], hbar: f64) -> Result<NcParams> {
    NcParams::new(theta, eta, hbar)
}

/// `(i/2) Θ_ab ∂_a f ∂_b g`, summed over the grid's axes.
fn moyal_correction(df: &[ComplexField], dg: &[ComplexField], nc: &NcParams) -> ComplexField {
    let grid = df[0].grid();
    let theta = nc.theta_matrix();
    let mut acc = vec![Complex64::default(); grid.len()];
    let dim = grid.dim();
    for a in 0..dim {
        for b in 0..dim {
            let t = theta[a][b];
            if t == 0.0 {
                continue;
            }
            let coef = I * (0.5 * t);
            for ((o, fa), gb) in acc.iter_mut().zip(df[a].values()).zip(dg[b].values()) {
                *o += coef * fa * gb;
            }
        }
    }
    ComplexField::from_raw(grid, acc)
}

fn in_plane_theta(nc: &NcParams, grid: &Grid) -> Result<bool> {
    nc.check_dim(grid.dim())?;
    Ok(nc.has_theta() && grid.dim() >= 2)
}

/// The Θ part of `V⋆ψ` alone: `(i/2) Θ_ab (∂_a V)(∂_b ψ)`.
pub fn star_correction(v: &LocalPotential, psi: &ComplexField, nc: &NcParams) -> Result<ComplexField> {
    v.grid().ensure_same(psi.grid(), "star product")?;
    if !in_plane_theta(nc, psi.grid())? {
        return Ok(ComplexField::zeros(psi.grid()));
    }
    Ok(moyal_correction(v.gradient(), &psi.gradients(), nc))
}

/// `V⋆ψ` to first order in Θ, using the potential's stored gradient.
pub fn star_apply_local(v: &LocalPotential, psi: &ComplexField, nc: &NcParams) -> Result<ComplexField> {
    let plain = v.value().zip_map(psi, |a, b| a * b)?;
    if !in_plane_theta(nc, psi.grid())? {
        return Ok(plain);
    }
    let corr = moyal_correction(v.gradient(), &psi.gradients(), nc);
    plain.zip_map(&corr, |a, b| a + b)
}

/// `f⋆g = f·g + (i/2) Θ_ab ∂_a f ∂_b g`.
pub fn star_product_first_order(f: &ComplexField, g: &ComplexField, nc: &NcParams) -> Result<ComplexField> {
    let plain = f.zip_map(g, |a, b| a * b)?;
    if !in_plane_theta(nc, f.grid())? {
        return Ok(plain);
    }
    let corr = moyal_correction(&f.gradients(), &g.gradients(), nc);
    plain.zip_map(&corr, |a, b| a + b)
}

/// Components of `L = r × p` with `p = −iħ∇`, origin at the box centre.
/// Returns `[L_z]` on 2D grids and `[L_x, L_y, L_z]` on 3D grids.
pub fn angular_momentum_apply(psi: &ComplexField, hbar: f64) -> Result<Vec<ComplexField>> {
    let grid = psi.grid();
    let dim = grid.dim();
    if dim < 2 {
        return Err(Error::Domain("angular momentum needs at least two dimensions".into()));
    }
    let grads = psi.gradients();
    let component = |i: usize, j: usize| -> ComplexField {
        // −iħ (x_i ∂_j − x_j ∂_i)
        let out = (0..grid.len())
            .map(|flat| {
                let r = grid.position(flat);
                (grads[j].values()[flat] * r[i] - grads[i].values()[flat] * r[j]) * (-I * hbar)
            })
            .collect();
        ComplexField::from_raw(grid, out)
    };
    Ok(if dim == 2 {
        vec![component(0, 1)]
    } else {
        vec![component(1, 2), component(2, 0), component(0, 1)]
    })
}

/// `Σ_k η_k L_k ψ`. Zero in 1D or when η vanishes.
pub fn eta_dot_l(psi: &ComplexField, nc: &NcParams) -> Result<ComplexField> {
    let grid = psi.grid();
    nc.check_dim(grid.dim())?;
    if !nc.has_eta() {
        return Ok(ComplexField::zeros(grid));
    }
    let l = angular_momentum_apply(psi, nc.hbar())?;
    let eta = nc.eta();
    let weights: Vec<f64> = if grid.dim() == 2 { vec![eta[2]] } else { eta.to_vec() };
    let mut acc = vec![Complex64::default(); grid.len()];
    for (lk, w) in l.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        acc.iter_mut().zip(lk.values()).for_each(|(a, v)| *a += v * w);
    }
    Ok(ComplexField::from_raw(grid, acc))
}

/// `(1/2m)[−ħ²∇²ψ − (2/ħ) η·L ψ]`.
pub fn nc_kinetic_apply(psi: &ComplexField, nc: &NcParams, mass: f64) -> Result<ComplexField> {
    let hbar = nc.hbar();
    let lap = psi.laplacian();
    let free = lap.scale(Complex64::new(-hbar * hbar / (2.0 * mass), 0.0));
    if !nc.has_eta() {
        nc.check_dim(psi.grid().dim())?;
        return Ok(free);
    }
    let bopp = eta_dot_l(psi, nc)?;
    free.axpy(Complex64::new(-1.0 / (mass * hbar), 0.0), &bopp)
}
