use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fieldlab::{Boundary, ComplexField, Grid};
use crate::ncalgebra::{eta_dot_l, star_correction, NcParams};
use crate::potentials::{
    apply_nonlocal_momentum, eval_local, LocalPotential, LocalPotentialSpec, NonlocalKernelSpec,
    NonlocalOperator,
};

/// How the non-local term is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NonlocalPath {
    /// Direct quadrature of the kernel on the grid.
    #[default]
    Quadrature,
    /// Gaussian multiplier in momentum space (Frahn-Lemmer, periodic only).
    Momentum,
    /// Gradient expansion of the Gaussian multiplier to first order in `β²`.
    FlApprox,
}

impl NonlocalPath {
    pub fn as_str(self) -> &'static str {
        match self {
            NonlocalPath::Quadrature => "quadrature",
            NonlocalPath::Momentum => "momentum",
            NonlocalPath::FlApprox => "fl-approx",
        }
    }
}

impl fmt::Display for NonlocalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NonlocalPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadrature" => Ok(NonlocalPath::Quadrature),
            "momentum" => Ok(NonlocalPath::Momentum),
            "fl-approx" => Ok(NonlocalPath::FlApprox),
            other => Err(Error::Configuration(format!(
                "unknown nonlocal path `{other}` (expected quadrature, momentum or fl-approx)"
            ))),
        }
    }
}

/// Coefficients `(a, b)` of `−a∇²ψ + b (L·η)ψ + V₀ψ`:
/// `a = ħ²/2m + V₀β²/4`, `b = V₀β²/2ħ³ − 1/mħ`.
pub fn fl_nc_coefficients(v0: f64, beta: f64, mass: f64, hbar: f64) -> (f64, f64) {
    let a = hbar * hbar / (2.0 * mass) + v0 * beta * beta / 4.0;
    let b = v0 * beta * beta / (2.0 * hbar.powi(3)) - 1.0 / (mass * hbar);
    (a, b)
}

/// Relative L2 gap between the Gaussian multiplier and its linearization,
/// both acting on `ψ` with the `η·L` shift carried to first order:
///
/// `exact = V₀ e^{−p²β²/4ħ²} (1 + β²/(2ħ³) η·L) ψ`,
/// `approx = V₀ (1 − p²β²/4ħ² + β²/(2ħ³) η·L) ψ`.
pub fn fl_expansion_error(psi: &ComplexField, v0: f64, beta: f64, nc: &NcParams) -> Result<f64> {
    psi.grid().require_periodic("fl_expansion_error")?;
    let hbar = nc.hbar();
    let shift = beta * beta / (2.0 * hbar.powi(3));
    let l_eta = eta_dot_l(psi, nc)?;
    let shifted = psi.axpy(Complex64::new(shift, 0.0), &l_eta)?;
    let exact = apply_nonlocal_momentum(v0, beta, &shifted)?;
    let approx = psi
        .axpy(Complex64::new(beta * beta / 4.0, 0.0), &psi.laplacian())?
        .axpy(Complex64::new(shift, 0.0), &l_eta)?
        .scale(Complex64::new(v0, 0.0));
    let denom = exact.l2_norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(exact.axpy(Complex64::new(-1.0, 0.0), &approx)?.l2_norm() / denom)
}

/// Parameters of a (possibly non-commutative) Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    pub mass: f64,
    pub hbar: f64,
    pub local: LocalPotentialSpec,
    pub nonlocal: Option<NonlocalKernelSpec>,
    pub nc: NcParams,
    pub nonlocal_path: NonlocalPath,
}

impl HamiltonianSpec {
    /// Free particle, commutative.
    pub fn free(mass: f64, hbar: f64) -> Self {
        Self {
            mass,
            hbar,
            local: LocalPotentialSpec::None,
            nonlocal: None,
            nc: NcParams::commutative(hbar),
            nonlocal_path: NonlocalPath::Quadrature,
        }
    }

    pub fn with_local(mut self, local: LocalPotentialSpec) -> Self {
        self.local = local;
        self
    }

    pub fn with_nonlocal(mut self, kernel: NonlocalKernelSpec, path: NonlocalPath) -> Self {
        self.nonlocal = Some(kernel);
        self.nonlocal_path = path;
        self
    }

    pub fn with_nc(mut self, nc: NcParams) -> Self {
        self.nc = nc;
        self
    }

    /// `(a, b)` when the fl-approx path is active.
    pub fn fl_coefficients(&self) -> Option<(f64, f64)> {
        match (&self.nonlocal, self.nonlocal_path) {
            (Some(NonlocalKernelSpec::FrahnLemmer { v0, beta }), NonlocalPath::FlApprox) => {
                Some(fl_nc_coefficients(*v0, *beta, self.mass, self.hbar))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
enum NonlocalTerm {
    None,
    Quadrature(NonlocalOperator),
    Momentum { v0: f64, beta: f64 },
    FlApprox { v0: f64, beta: f64 },
}

/// Individual pieces of `Hψ`. Terms that vanish identically are `None`.
#[derive(Clone, Debug)]
pub struct HamiltonianTerms {
    /// `−(ħ²/2m)∇²ψ`.
    pub kinetic: ComplexField,
    /// `−(1/mħ)(η·L)ψ`.
    pub bopp: Option<ComplexField>,
    /// `V_L ψ`.
    pub local: Option<ComplexField>,
    /// `(i/2) Θ_ab ∂_aV_L ∂_bψ`.
    pub star: Option<ComplexField>,
    /// Non-local term by the selected path.
    pub nonlocal: Option<ComplexField>,
}

impl HamiltonianTerms {
    pub fn total(&self) -> ComplexField {
        let mut acc = self.kinetic.values().to_vec();
        for term in [&self.bopp, &self.local, &self.star, &self.nonlocal].into_iter().flatten() {
            acc.iter_mut().zip(term.values()).for_each(|(a, t)| *a += t);
        }
        ComplexField::from_raw(self.kinetic.grid(), acc)
    }
}

/// A Hamiltonian bound to a grid.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    spec: HamiltonianSpec,
    grid: Grid,
    local: Option<LocalPotential>,
    nonlocal: NonlocalTerm,
}

impl Hamiltonian {
    pub fn bind(spec: &HamiltonianSpec, grid: &Grid) -> Result<Self> {
        if !(spec.mass > 0.0 && spec.mass.is_finite()) {
            return Err(Error::Domain(format!("mass must be positive, got {}", spec.mass)));
        }
        if !(spec.hbar > 0.0 && spec.hbar.is_finite()) {
            return Err(Error::Domain(format!("hbar must be positive, got {}", spec.hbar)));
        }
        if spec.nc.hbar() != spec.hbar {
            return Err(Error::InconsistentParameters(format!(
                "non-commutativity parameters use hbar = {} but the Hamiltonian uses {}",
                spec.nc.hbar(),
                spec.hbar
            )));
        }
        spec.nc.check_dim(grid.dim())?;
        let local = if spec.local.is_none() {
            None
        } else {
            Some(eval_local(&spec.local, grid)?)
        };
        let nonlocal = match (&spec.nonlocal, spec.nonlocal_path) {
            (None, _) => NonlocalTerm::None,
            (Some(kernel), NonlocalPath::Quadrature) => {
                NonlocalTerm::Quadrature(NonlocalOperator::bind(kernel, grid)?)
            }
            (Some(kernel), path) => {
                let NonlocalKernelSpec::FrahnLemmer { v0, beta } = *kernel else {
                    return Err(Error::Configuration(format!(
                        "the {path} path needs a frahn-lemmer kernel"
                    )));
                };
                if grid.boundary() != Boundary::Periodic {
                    return Err(Error::Configuration(format!(
                        "the {path} path needs a periodic grid"
                    )));
                }
                if !(beta > 0.0) {
                    return Err(Error::Domain(format!(
                        "non-locality range must be positive, got {beta}"
                    )));
                }
                match path {
                    NonlocalPath::Momentum => NonlocalTerm::Momentum { v0, beta },
                    _ => NonlocalTerm::FlApprox { v0, beta },
                }
            }
        };
        Ok(Self {
            spec: spec.clone(),
            grid: grid.clone(),
            local,
            nonlocal,
        })
    }

    pub fn spec(&self) -> &HamiltonianSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.spec.mass
    }

    pub fn hbar(&self) -> f64 {
        self.spec.hbar
    }

    pub fn nc(&self) -> &NcParams {
        &self.spec.nc
    }

    pub fn local_potential(&self) -> Option<&LocalPotential> {
        self.local.as_ref()
    }

    pub fn has_star_term(&self) -> bool {
        self.grid.dim() >= 2
            && self.spec.nc.has_theta()
            && self.local.as_ref().is_some_and(|v| v.has_gradient())
    }

    pub fn has_bopp_term(&self) -> bool {
        self.grid.dim() >= 2 && self.spec.nc.has_eta()
    }

    pub fn has_nonlocal(&self) -> bool {
        !matches!(self.nonlocal, NonlocalTerm::None)
    }

    /// True when every term is self-adjoint on the grid.
    pub fn is_hermitian(&self) -> bool {
        let local_real = self.local.as_ref().map_or(true, |v| v.is_real());
        let kernel_ok = match &self.nonlocal {
            NonlocalTerm::Quadrature(op) => op.is_real_symmetric(),
            _ => true,
        };
        local_real && kernel_ok
    }

    /// Whether `H` splits into a momentum-diagonal and a position-diagonal part.
    pub fn supports_split_step(&self) -> bool {
        self.grid.is_periodic()
            && !self.has_star_term()
            && !self.has_bopp_term()
            && matches!(
                self.nonlocal,
                NonlocalTerm::None | NonlocalTerm::Momentum { .. } | NonlocalTerm::FlApprox { .. }
            )
    }

    /// Momentum-space symbol of the kinetic plus non-local part, for the split-step path.
    pub(crate) fn momentum_symbol(&self, k2: f64) -> Option<f64> {
        let kin = self.spec.hbar * self.spec.hbar * k2 / (2.0 * self.spec.mass);
        match self.nonlocal {
            NonlocalTerm::None => Some(kin),
            NonlocalTerm::Momentum { v0, beta } => {
                Some(kin + crate::potentials::momentum_multiplier(v0, beta, k2))
            }
            NonlocalTerm::FlApprox { v0, beta } => Some(kin + v0 * (1.0 - beta * beta * k2 / 4.0)),
            NonlocalTerm::Quadrature(_) => None,
        }
    }

    /// The non-local term alone.
    pub fn apply_nonlocal_term(&self, psi: &ComplexField) -> Result<Option<ComplexField>> {
        let hbar = self.spec.hbar;
        Ok(match &self.nonlocal {
            NonlocalTerm::None => None,
            NonlocalTerm::Quadrature(op) => Some(op.apply(psi)?),
            NonlocalTerm::Momentum { v0, beta } => Some(apply_nonlocal_momentum(*v0, *beta, psi)?),
            NonlocalTerm::FlApprox { v0, beta } => {
                let b2 = beta * beta;
                let mut out = psi
                    .axpy(Complex64::new(b2 / 4.0, 0.0), &psi.laplacian())?
                    .scale(Complex64::new(*v0, 0.0));
                if self.has_bopp_term() {
                    let l_eta = eta_dot_l(psi, &self.spec.nc)?;
                    out = out.axpy(Complex64::new(v0 * b2 / (2.0 * hbar.powi(3)), 0.0), &l_eta)?;
                }
                Some(out)
            }
        })
    }

    pub fn terms(&self, psi: &ComplexField) -> Result<HamiltonianTerms> {
        self.grid.ensure_same(psi.grid(), "Hamiltonian")?;
        let (m, hbar) = (self.spec.mass, self.spec.hbar);
        let kinetic = psi.laplacian().scale(Complex64::new(-hbar * hbar / (2.0 * m), 0.0));
        let bopp = if self.has_bopp_term() {
            Some(eta_dot_l(psi, &self.spec.nc)?.scale(Complex64::new(-1.0 / (m * hbar), 0.0)))
        } else {
            None
        };
        let local = match &self.local {
            Some(v) => Some(v.value().zip_map(psi, |a, b| a * b)?),
            None => None,
        };
        let star = match &self.local {
            Some(v) if self.has_star_term() => Some(star_correction(v, psi, &self.spec.nc)?),
            _ => None,
        };
        let nonlocal = self.apply_nonlocal_term(psi)?;
        Ok(HamiltonianTerms {
            kinetic,
            bopp,
            local,
            star,
            nonlocal,
        })
    }

    pub fn apply(&self, psi: &ComplexField) -> Result<ComplexField> {
        Ok(self.terms(psi)?.total())
    }

    /// `⟨ψ,Hψ⟩/⟨ψ,ψ⟩`.
    pub fn energy(&self, psi: &ComplexField) -> Result<Complex64> {
        let h_psi = self.apply(psi)?;
        Ok(psi.inner(&h_psi)? / psi.norm_sqr())
    }

    /// Upper estimate of the spectral radius of `H` on this grid.
    pub fn spectral_bound(&self) -> f64 {
        let g = &self.grid;
        let (m, hbar) = (self.spec.mass, self.spec.hbar);
        let k2_max: f64 = (0..g.dim())
            .map(|a| {
                let h = g.spacing()[a];
                match g.boundary() {
                    Boundary::Periodic => (std::f64::consts::PI / h).powi(2),
                    Boundary::DirichletZero => 4.0 / (h * h),
                }
            })
            .sum();
        let k_max = k2_max.sqrt();
        let r_max = g.extent().iter().map(|l| (l / 2.0).powi(2)).sum::<f64>().sqrt();
        let eta = self.spec.nc.eta();
        let eta_norm = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
        let theta_norm = self.spec.nc.theta().iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut bound = hbar * hbar * k2_max / (2.0 * m);
        if self.has_bopp_term() {
            bound += eta_norm * r_max * k_max / m;
        }
        if let Some(v) = &self.local {
            bound += v.value().max_abs();
            if self.has_star_term() {
                let grad_max = v.gradient().iter().map(|c| c.max_abs()).fold(0.0, f64::max);
                bound += 0.5 * theta_norm * grad_max * k_max * g.dim() as f64;
            }
        }
        bound += match &self.nonlocal {
            NonlocalTerm::None => 0.0,
            NonlocalTerm::Momentum { v0, .. } => v0.abs(),
            NonlocalTerm::FlApprox { v0, beta } => {
                v0.abs() * (1.0 + beta * beta * k2_max / 4.0)
                    + v0.abs() * beta * beta / (2.0 * hbar.powi(3)) * eta_norm * hbar * r_max * k_max
            }
            NonlocalTerm::Quadrature(op) => match &self.spec.nonlocal {
                Some(NonlocalKernelSpec::FrahnLemmer { v0, .. }) => v0.abs() * op.normalization(),
                Some(NonlocalKernelSpec::Tabulated { samples, .. }) => {
                    let n = g.len();
                    (0..n)
                        .map(|i| samples[i * n..(i + 1) * n].iter().map(|v| v.norm()).sum::<f64>())
                        .fold(0.0, f64::max)
                        * g.cell_volume()
                }
                None => 0.0,
            },
        };
        bound
    }
}

/// `Hψ` for a specification bound to `ψ`'s grid.
pub fn apply_hamiltonian(spec: &HamiltonianSpec, psi: &ComplexField) -> Result<ComplexField> {
    Hamiltonian::bind(spec, psi.grid())?.apply(psi)
}
