use num_complex::Complex64;

use super::hamiltonian::Hamiltonian;
use crate::error::{Error, Result};
use crate::fieldlab::{ComplexField, Grid};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundStateOptions {
    /// Imaginary time step; `None` picks `0.9ħ/‖H‖` from the spectral bound.
    pub dtau: Option<f64>,
    /// Stop once the energy changes by less than this per step...
    pub energy_tol: f64,
    /// ...and, if set, `‖Hψ − Eψ‖ ≤ residual_tol` for the unit-norm state.
    pub residual_tol: Option<f64>,
    pub max_iters: usize,
    /// Restrict to angular momentum `m (mod 4)` on a square periodic 2D grid.
    pub sector: Option<i32>,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self {
            dtau: None,
            energy_tol: 1e-10,
            residual_tol: None,
            max_iters: 200_000,
            sector: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub psi: ComplexField,
    pub energy: f64,
    pub iterations: usize,
    /// `‖Hψ − Eψ‖` at exit.
    pub residual: f64,
}

/// Quarter turn `(Rψ)(x, y) = ψ(y, −x)` on a square periodic grid.
fn rotate_quarter(psi: &ComplexField) -> ComplexField {
    let g = psi.grid();
    let n = g.points()[0];
    let v = psi.values();
    let out = (0..g.len())
        .map(|flat| {
            let (i, j) = (flat / n, flat % n);
            v[j * n + (n - i) % n]
        })
        .collect();
    ComplexField::from_raw(g, out)
}

/// `P_m = ¼ Σ_j e^{i m j π/2} R^j`.
pub fn project_sector(psi: &ComplexField, m: i32) -> Result<ComplexField> {
    check_sector_grid(psi.grid())?;
    let mut acc = psi.values().to_vec();
    let mut rotated = psi.clone();
    for j in 1..4 {
        rotated = rotate_quarter(&rotated);
        let phase = Complex64::from_polar(1.0, f64::from(m) * f64::from(j) * std::f64::consts::FRAC_PI_2);
        acc.iter_mut().zip(rotated.values()).for_each(|(a, r)| *a += phase * r);
    }
    acc.iter_mut().for_each(|a| *a *= 0.25);
    Ok(ComplexField::from_raw(psi.grid(), acc))
}

fn check_sector_grid(g: &Grid) -> Result<()> {
    if g.dim() != 2 || !g.is_periodic() || g.points()[0] != g.points()[1] || g.extent()[0] != g.extent()[1] {
        return Err(Error::Configuration(
            "angular momentum sectors need a square periodic 2D grid".into(),
        ));
    }
    Ok(())
}

/// Lowest state of `h` reachable from `initial` by imaginary-time descent.
pub fn ground_state(h: &Hamiltonian, initial: &ComplexField, opts: &GroundStateOptions) -> Result<GroundState> {
    if !h.is_hermitian() {
        return Err(Error::Configuration(
            "ground-state search needs a Hermitian Hamiltonian".into(),
        ));
    }
    h.grid().ensure_same(initial.grid(), "ground state")?;
    let hbar = h.hbar();
    let dtau = opts.dtau.unwrap_or(0.9 * hbar / h.spectral_bound());
    if !(dtau > 0.0) {
        return Err(Error::Configuration(format!("imaginary time step must be positive, got {dtau}")));
    }
    let project = |psi: &ComplexField| -> Result<ComplexField> {
        match opts.sector {
            Some(m) => project_sector(psi, m),
            None => Ok(psi.clone()),
        }
    };
    let mut psi = project(initial)?.normalized()?;
    let mut h_psi = h.apply(&psi)?;
    let mut energy = psi.inner(&h_psi)?.re;
    for it in 1..=opts.max_iters {
        let next = psi.axpy(Complex64::new(-dtau / hbar, 0.0), &h_psi)?;
        psi = project(&next)?.normalized()?;
        h_psi = h.apply(&psi)?;
        let e = psi.inner(&h_psi)?.re;
        let de = (e - energy).abs();
        energy = e;
        if de < opts.energy_tol {
            let residual = h_psi.axpy(Complex64::new(-energy, 0.0), &psi)?.l2_norm();
            if opts.residual_tol.map_or(true, |tol| residual <= tol) {
                return Ok(GroundState {
                    psi,
                    energy,
                    iterations: it,
                    residual,
                });
            }
        }
    }
    let residual = h_psi.axpy(Complex64::new(-energy, 0.0), &psi)?.l2_norm();
    Err(Error::Iteration {
        solver: "imaginary-time descent",
        iterations: opts.max_iters,
        residual,
    })
}
