use std::fmt;
use std::str::FromStr;

use log::warn;
use num_complex::Complex64;

use super::hamiltonian::Hamiltonian;
use crate::error::{Error, Result};
use crate::fieldlab::spectral::{self, Wavenumbers};
use crate::fieldlab::ComplexField;
use crate::linalg::bicgstab;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TimeMode {
    #[default]
    RealTime,
    ImaginaryTime,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scheme {
    #[default]
    CrankNicolson,
    SplitStep,
}

impl TimeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TimeMode::RealTime => "real-time",
            TimeMode::ImaginaryTime => "imaginary-time",
        }
    }
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::CrankNicolson => "crank-nicolson",
            Scheme::SplitStep => "split-step",
        }
    }
}

impl fmt::Display for TimeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TimeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real-time" => Ok(TimeMode::RealTime),
            "imaginary-time" => Ok(TimeMode::ImaginaryTime),
            other => Err(Error::Configuration(format!(
                "unknown time mode `{other}` (expected real-time or imaginary-time)"
            ))),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "crank-nicolson" => Ok(Scheme::CrankNicolson),
            "split-step" => Ok(Scheme::SplitStep),
            other => Err(Error::Configuration(format!(
                "unknown scheme `{other}` (expected crank-nicolson or split-step)"
            ))),
        }
    }
}

pub const DEFAULT_SOLVER_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITERS: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorConfig {
    pub dt: f64,
    pub mode: TimeMode,
    pub scheme: Scheme,
    pub solver_tol: f64,
    pub max_iters: usize,
}

impl PropagatorConfig {
    pub fn real_time(dt: f64) -> Self {
        Self {
            dt,
            mode: TimeMode::RealTime,
            scheme: Scheme::CrankNicolson,
            solver_tol: DEFAULT_SOLVER_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }

    pub fn imaginary_time(dt: f64) -> Self {
        Self {
            mode: TimeMode::ImaginaryTime,
            ..Self::real_time(dt)
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_solver_tol(mut self, tol: f64) -> Self {
        self.solver_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Configuration(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.solver_tol > 0.0 && self.solver_tol < 1e-6) {
            return Err(Error::Configuration(format!(
                "solver tolerance must lie in (0, 1e-6), got {:e}",
                self.solver_tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Configuration("max solver iterations must be positive".into()));
        }
        Ok(())
    }
}

/// Precomputed phase factors for Strang splitting.
#[derive(Clone, Debug)]
struct SplitFactors {
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
}

/// Time stepper bound to one Hamiltonian.
#[derive(Clone, Debug)]
pub struct Propagator<'h> {
    h: &'h Hamiltonian,
    cfg: PropagatorConfig,
    split: Option<SplitFactors>,
    last_iterations: usize,
    last_residual: f64,
}

impl<'h> Propagator<'h> {
    pub fn new(h: &'h Hamiltonian, cfg: PropagatorConfig) -> Result<Self> {
        cfg.validate()?;
        let scale = cfg.dt * h.spectral_bound() / h.hbar();
        if scale >= 1.0 {
            warn!("dt·|H|/ħ ≈ {scale:.3e} is not small; expect phase errors or slow convergence");
        }
        let split = match (cfg.scheme, cfg.mode) {
            (Scheme::SplitStep, _) if !h.supports_split_step() => {
                return Err(Error::Configuration(
                    "split-step needs a periodic grid, no Θ star term, no η·L term and a \
                     momentum-diagonal non-local path"
                        .into(),
                ))
            }
            (Scheme::SplitStep, TimeMode::RealTime) => Some(split_factors(h, cfg.dt)),
            _ => None,
        };
        Ok(Self {
            h,
            cfg,
            split,
            last_iterations: 0,
            last_residual: 0.0,
        })
    }

    pub fn config(&self) -> &PropagatorConfig {
        &self.cfg
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        self.h
    }

    /// Iterations and relative residual of the most recent linear solve.
    pub fn last_solve(&self) -> (usize, f64) {
        (self.last_iterations, self.last_residual)
    }

    pub fn step(&mut self, psi: &ComplexField) -> Result<ComplexField> {
        self.h.grid().ensure_same(psi.grid(), "propagator")?;
        let out = match self.cfg.mode {
            TimeMode::ImaginaryTime => self.imaginary_step(psi)?,
            TimeMode::RealTime => match &self.split {
                Some(f) => split_step(psi, f),
                None => self.crank_nicolson(psi)?,
            },
        };
        if !out.is_finite() {
            return Err(Error::Numerical("non-finite wavefunction after time step".into()));
        }
        Ok(out)
    }

    fn crank_nicolson(&mut self, psi: &ComplexField) -> Result<ComplexField> {
        let h = self.h;
        let grid = psi.grid();
        let tau = Complex64::new(0.0, self.cfg.dt / (2.0 * h.hbar()));
        let h_psi = h.apply(psi)?;
        let b: Vec<Complex64> = psi
            .values()
            .iter()
            .zip(h_psi.values())
            .map(|(p, hp)| p - tau * hp)
            .collect();
        let mut x: Vec<Complex64> = b
            .iter()
            .zip(h_psi.values())
            .map(|(b, hp)| b - tau * hp)
            .collect();
        let apply = |v: &[Complex64]| -> Vec<Complex64> {
            let field = ComplexField::from_raw(grid, v.to_vec());
            // Grid and values are consistent, so apply cannot fail.
            let hv = h.apply(&field).expect("Hamiltonian bound to this grid");
            v.iter().zip(hv.values()).map(|(v, hv)| v + tau * hv).collect()
        };
        let stats = bicgstab(apply, &b, &mut x, self.cfg.solver_tol, self.cfg.max_iters)?;
        self.last_iterations = stats.iterations;
        self.last_residual = stats.relative_residual;
        Ok(ComplexField::from_raw(grid, x))
    }

    fn imaginary_step(&mut self, psi: &ComplexField) -> Result<ComplexField> {
        let h_psi = self.h.apply(psi)?;
        let next = psi.axpy(Complex64::new(-self.cfg.dt / self.h.hbar(), 0.0), &h_psi)?;
        self.last_iterations = 0;
        self.last_residual = 0.0;
        let norm = psi.l2_norm();
        Ok(next.normalized()?.scale(Complex64::new(norm, 0.0)))
    }
}

fn split_factors(h: &Hamiltonian, dt: f64) -> SplitFactors {
    let grid = h.grid();
    let hbar = h.hbar();
    let half_potential = match h.local_potential() {
        Some(v) => v
            .value()
            .values()
            .iter()
            .map(|v| (Complex64::new(0.0, -dt / (2.0 * hbar)) * v).exp())
            .collect(),
        None => vec![Complex64::new(1.0, 0.0); grid.len()],
    };
    let k2 = Wavenumbers::new(grid).k_squared(grid);
    let kinetic = k2
        .iter()
        .map(|&k2| {
            let t = h.momentum_symbol(k2).expect("split-step support checked");
            Complex64::from_polar(1.0, -t * dt / hbar)
        })
        .collect();
    SplitFactors {
        half_potential,
        kinetic,
    }
}

fn split_step(psi: &ComplexField, f: &SplitFactors) -> ComplexField {
    let grid = psi.grid();
    let mut v: Vec<Complex64> = psi
        .values()
        .iter()
        .zip(&f.half_potential)
        .map(|(p, e)| p * e)
        .collect();
    spectral::forward(&mut v, grid);
    v.iter_mut().zip(&f.kinetic).for_each(|(v, e)| *v *= e);
    spectral::inverse(&mut v, grid);
    v.iter_mut().zip(&f.half_potential).for_each(|(v, e)| *v *= e);
    ComplexField::from_raw(grid, v)
}

/// One step of `ψ` under `h` with a freshly built propagator.
pub fn step(psi: &ComplexField, h: &Hamiltonian, cfg: &PropagatorConfig) -> Result<ComplexField> {
    Propagator::new(h, *cfg)?.step(psi)
}
