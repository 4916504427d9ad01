//! Continuity-equation diagnostics.
//!
//! With `iħ∂ψ/∂t = Hψ` the density obeys `∂ρ/∂t = (2/ħ) Im(ψ* Hψ)`. The
//! kinetic term produces `−∇·J` with `J = (ħ/m) Im(ψ*∇ψ)`; every other term
//! `T` of `H` contributes a sink `σ_T = −(2/ħ) Im(ψ* Tψ)`, so that
//!
//! `∂ρ/∂t + ∇·J + σ_NL + σ_L^nc + σ_C = 0`,
//!
//! where `σ_L^nc` is the local sink including the Θ star correction and
//! `σ_C` comes from the Bopp-shifted `η·L` term. Solving one Poisson problem
//! per sink turns the balance into a pure divergence of a corrected current.

mod poisson;

use log::warn;
use num_complex::Complex64;

use crate::dynamics::Hamiltonian;
use crate::error::Result;
use crate::fieldlab::{ComplexField, RealField, VectorField};
use crate::ncalgebra::{eta_dot_l, star_correction, NcParams};
use crate::potentials::{apply_nonlocal, LocalPotential, NonlocalKernelSpec};

pub use poisson::{poisson_solve, COMPATIBILITY_TOL};

/// `|ψ|²`.
pub fn density(psi: &ComplexField) -> RealField {
    psi.norm_sqr_field()
}

/// `J = (ħ/m) Im(ψ* ∇ψ)`.
pub fn current(psi: &ComplexField, mass: f64, hbar: f64) -> VectorField {
    let scale = hbar / mass;
    let comps = psi
        .gradients()
        .iter()
        .map(|d| {
            let v = psi.values().iter().zip(d.values()).map(|(p, d)| scale * (p.conj() * d).im).collect();
            RealField::from_raw(psi.grid(), v)
        })
        .collect();
    VectorField::from_components(psi.grid(), comps).expect("one component per axis")
}

/// `σ = −(2/ħ) Im(ψ* · Tψ)` for an already applied term `Tψ`.
pub fn sink_from_term(psi: &ComplexField, t_psi: &ComplexField, hbar: f64) -> Result<RealField> {
    psi.grid().ensure_same(t_psi.grid(), "sink")?;
    let s = -2.0 / hbar;
    let v = psi
        .values()
        .iter()
        .zip(t_psi.values())
        .map(|(p, t)| s * (p.conj() * t).im)
        .collect();
    Ok(RealField::from_raw(psi.grid(), v))
}

/// `σ_NL = −(2/ħ) Im(ψ* Kψ)` with `K` applied by quadrature.
pub fn sink_nonlocal(psi: &ComplexField, kernel: &NonlocalKernelSpec, hbar: f64) -> Result<RealField> {
    sink_from_term(psi, &apply_nonlocal(kernel, psi)?, hbar)
}

/// `σ_L = (2/ħ) W |ψ|²` for `V_L = V_R − iW`.
pub fn sink_local(psi: &ComplexField, v: &LocalPotential, hbar: f64) -> Result<RealField> {
    v.grid().ensure_same(psi.grid(), "local sink")?;
    let s = 2.0 / hbar;
    let out = psi
        .values()
        .iter()
        .zip(v.value().values())
        .map(|(p, v)| -s * v.im * p.norm_sqr())
        .collect();
    Ok(RealField::from_raw(psi.grid(), out))
}

/// `σ_L` plus the star-product part `−(1/ħ) Re(Θ_ab ψ* ∂_aV ∂_bψ)`.
pub fn sink_local_nc(psi: &ComplexField, v: &LocalPotential, nc: &NcParams, hbar: f64) -> Result<RealField> {
    let base = sink_local(psi, v, hbar)?;
    if !nc.has_theta() || psi.grid().dim() < 2 {
        nc.check_dim(psi.grid().dim())?;
        return Ok(base);
    }
    base.add(&sink_from_term(psi, &star_correction(v, psi, nc)?, hbar)?)
}

/// `σ_C = (2/mħ²) Im(ψ* (η·L)ψ)`, the sink of the `−(1/mħ) η·L` term.
pub fn sink_nc_phase(psi: &ComplexField, nc: &NcParams, mass: f64, hbar: f64) -> Result<RealField> {
    let l_eta = eta_dot_l(psi, nc)?;
    if !nc.has_eta() {
        return Ok(RealField::zeros(psi.grid()));
    }
    sink_from_term(psi, &l_eta.scale(Complex64::new(-1.0 / (mass * hbar), 0.0)), hbar)
}

/// Sink densities, each real.
#[derive(Clone, Debug, PartialEq)]
pub struct SinkFields {
    pub sigma_nl: RealField,
    pub sigma_l: RealField,
    /// `σ_L` plus the Θ star-product part.
    pub sigma_l_nc: RealField,
    pub sigma_c: RealField,
}

impl SinkFields {
    /// `σ_L^nc − σ_L`.
    pub fn theta_part(&self) -> RealField {
        self.sigma_l_nc.sub(&self.sigma_l).expect("same grid")
    }

    pub fn integrals(&self) -> SinkIntegrals {
        SinkIntegrals {
            nl: self.sigma_nl.integrate(),
            l: self.sigma_l.integrate(),
            l_nc: self.sigma_l_nc.integrate(),
            c: self.sigma_c.integrate(),
        }
    }
}

/// `∫σ dV` for each sink.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SinkIntegrals {
    pub nl: f64,
    pub l: f64,
    pub l_nc: f64,
    pub c: f64,
}

/// Sink contributions that can be dropped from a residual for ablation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SinkTerm {
    Nonlocal,
    /// The Θ-free local sink.
    Local,
    /// The Θ part of the local sink.
    ThetaStar,
    Phase,
}

/// Continuity balance between two consecutive snapshots.
#[derive(Clone, Debug)]
pub struct ContinuityReport {
    /// Density at the midpoint state.
    pub rho: RealField,
    pub current: VectorField,
    pub sinks: SinkFields,
    /// `(|ψ_next|² − |ψ_prev|²)/dt`.
    pub drho_dt: RealField,
    pub residual_l2: f64,
    pub residual_max: f64,
    pub global_sink_integrals: SinkIntegrals,
}

impl ContinuityReport {
    pub fn assemble(rho: RealField, current: VectorField, sinks: SinkFields, drho_dt: RealField) -> Self {
        let mut report = Self {
            global_sink_integrals: sinks.integrals(),
            rho,
            current,
            sinks,
            drho_dt,
            residual_l2: 0.0,
            residual_max: 0.0,
        };
        let r = report.residual();
        report.residual_l2 = r.l2_norm();
        report.residual_max = r.max_abs();
        report
    }

    /// `∂ρ/∂t + ∇·J + σ_NL + σ_L^nc + σ_C`.
    pub fn residual(&self) -> RealField {
        self.residual_excluding(&[])
    }

    /// The residual with the listed sink contributions left out.
    pub fn residual_excluding(&self, dropped: &[SinkTerm]) -> RealField {
        let div = self.current.divergence();
        let theta = self.sinks.theta_part();
        let mut acc: Vec<f64> = self
            .drho_dt
            .values()
            .iter()
            .zip(div.values())
            .map(|(a, b)| a + b)
            .collect();
        let parts = [
            (SinkTerm::Nonlocal, &self.sinks.sigma_nl),
            (SinkTerm::Local, &self.sinks.sigma_l),
            (SinkTerm::ThetaStar, &theta),
            (SinkTerm::Phase, &self.sinks.sigma_c),
        ];
        for (term, field) in parts {
            if !dropped.contains(&term) {
                acc.iter_mut().zip(field.values()).for_each(|(a, s)| *a += s);
            }
        }
        RealField::from_raw(self.rho.grid(), acc)
    }

    /// `∂ρ/∂t + ∇·J` alone.
    pub fn naive_residual(&self) -> RealField {
        self.residual_excluding(&[SinkTerm::Nonlocal, SinkTerm::Local, SinkTerm::ThetaStar, SinkTerm::Phase])
    }
}

/// Builds the balance at the midpoint of two snapshots separated by `dt`.
///
/// For a Crank-Nicolson step the midpoint identity makes the residual a
/// pure measure of spatial discretization and solver error.
pub fn continuity_report(
    psi_prev: &ComplexField,
    psi_next: &ComplexField,
    dt: f64,
    h: &Hamiltonian,
) -> Result<ContinuityReport> {
    psi_prev.grid().ensure_same(psi_next.grid(), "continuity snapshots")?;
    h.grid().ensure_same(psi_prev.grid(), "continuity snapshots")?;
    let grid = psi_prev.grid();
    let mid = psi_prev.zip_map(psi_next, |a, b| (a + b) * 0.5)?;
    let hbar = h.hbar();
    let terms = h.terms(&mid)?;
    let sink = |t: &Option<ComplexField>| -> Result<RealField> {
        match t {
            Some(t) => sink_from_term(&mid, t, hbar),
            None => Ok(RealField::zeros(grid)),
        }
    };
    let sigma_l = sink(&terms.local)?;
    let sigma_l_nc = match &terms.star {
        Some(_) => sigma_l.add(&sink(&terms.star)?)?,
        None => sigma_l.clone(),
    };
    let sinks = SinkFields {
        sigma_nl: sink(&terms.nonlocal)?,
        sigma_l,
        sigma_l_nc,
        sigma_c: sink(&terms.bopp)?,
    };
    let drho_dt = density(psi_next).sub(&density(psi_prev))?.scale(1.0 / dt);
    Ok(ContinuityReport::assemble(
        density(&mid),
        current(&mid, h.mass(), hbar),
        sinks,
        drho_dt,
    ))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CurrentMode {
    #[default]
    Commutative,
    Nc,
}

/// A sink whose periodic Poisson problem had a nonzero source integral; its
/// mean was removed before solving and the integral is reported here.
#[derive(Clone, Debug, PartialEq)]
pub struct IrreducibleSink {
    pub name: &'static str,
    pub integral: f64,
}

/// Poisson-corrected currents.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentDecomposition {
    pub j: VectorField,
    /// `−∇χ_NL`.
    pub j_nl: VectorField,
    /// `−∇φ_L` (built from `σ_L^nc` in nc mode).
    pub j_l: VectorField,
    /// `∇φ_C`; zero in commutative mode.
    pub kappa: VectorField,
    pub j_tot: VectorField,
    pub chi_nl: RealField,
    pub phi_l: RealField,
    pub phi_c: RealField,
    /// `‖∇·J_tot‖`.
    pub div_jtot_l2: f64,
    /// `‖∇·J_tot + ∂ρ/∂t‖`.
    pub balance_l2: f64,
    pub irreducible: Vec<IrreducibleSink>,
}

fn sink_potential(sigma: &RealField, name: &'static str, irreducible: &mut Vec<IrreducibleSink>) -> Result<RealField> {
    if sigma.is_zero() {
        return Ok(RealField::zeros(sigma.grid()));
    }
    match poisson_solve(sigma) {
        Err(crate::Error::Compatibility { integral, .. }) => {
            warn!(
                "sink {name} integrates to {integral:e} on a periodic grid; its mean is not \
                 representable as a divergence and is reported as irreducible"
            );
            irreducible.push(IrreducibleSink { name, integral });
            let mean = sigma.mean();
            poisson_solve(&sigma.map(|v| v - mean))
        }
        other => other,
    }
}

/// Solves one Poisson problem per nonzero sink and assembles
/// `J_tot = J − ∇χ_NL − ∇φ_L (+ ∇φ_C)`, so that `∇·J_tot = −∂ρ/∂t`.
pub fn corrected_currents(report: &ContinuityReport, mode: CurrentMode) -> Result<CurrentDecomposition> {
    let grid = report.rho.grid();
    let mut irreducible = Vec::new();
    let chi_nl = sink_potential(&report.sinks.sigma_nl, "NL", &mut irreducible)?;
    let (phi_l, phi_c) = match mode {
        CurrentMode::Commutative => (
            sink_potential(&report.sinks.sigma_l, "L", &mut irreducible)?,
            RealField::zeros(grid),
        ),
        CurrentMode::Nc => (
            sink_potential(&report.sinks.sigma_l_nc, "L_nc", &mut irreducible)?,
            sink_potential(&report.sinks.sigma_c.scale(-1.0), "C", &mut irreducible)?,
        ),
    };
    let grad = |f: &RealField| {
        if f.is_zero() {
            VectorField::zeros(grid)
        } else {
            f.gradient_vector()
        }
    };
    let j_nl = grad(&chi_nl).scale(-1.0);
    let j_l = grad(&phi_l).scale(-1.0);
    let kappa = grad(&phi_c);
    let mut j_tot = report.current.clone();
    for extra in [&j_nl, &j_l, &kappa] {
        if !extra.is_zero() {
            j_tot = j_tot.add(extra)?;
        }
    }
    let div = j_tot.divergence();
    let div_jtot_l2 = div.l2_norm();
    let balance_l2 = div.add(&report.drho_dt)?.l2_norm();
    Ok(CurrentDecomposition {
        j: report.current.clone(),
        j_nl,
        j_l,
        kappa,
        j_tot,
        chi_nl,
        phi_l,
        phi_c,
        div_jtot_l2,
        balance_l2,
        irreducible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::Grid;
    use crate::potentials::{eval_local, LocalPotentialSpec};

    #[test]
    fn plane_wave_current() {
        let g = Grid::periodic(&[32], &[2.0 * std::f64::consts::PI]).unwrap();
        let psi = ComplexField::from_fn(&g, |r| Complex64::from_polar(0.5, 3.0 * r[0]));
        let j = current(&psi, 1.0, 1.0);
        assert!(j.component(0).values().iter().all(|v| (v - 0.75).abs() < 1e-12));
        let jc = current(&psi.conj(), 1.0, 1.0);
        assert!(j.add(&jc).unwrap().l2_norm() < 1e-13);
    }

    #[test]
    fn real_potential_has_no_local_sink() {
        let g = Grid::periodic(&[32], &[8.0]).unwrap();
        let psi = ComplexField::from_fn(&g, |r| Complex64::new(r[0].cos(), (2.0 * r[0]).sin()));
        let v = eval_local(&LocalPotentialSpec::GaussianWell { depth: 1.0, width: 1.0 }, &g).unwrap();
        assert_eq!(sink_local(&psi, &v, 1.0).unwrap().max_abs(), 0.0);
        let a = eval_local(&LocalPotentialSpec::ComplexAbsorber { w0: 0.3, region: None }, &g).unwrap();
        let s = sink_local(&psi, &a, 1.0).unwrap();
        let rho = density(&psi);
        assert!(s.sub(&rho.scale(0.6)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn zero_sinks_leave_current_untouched() {
        let g = Grid::periodic(&[32], &[8.0]).unwrap();
        let psi = ComplexField::from_fn(&g, |r| Complex64::from_polar((-r[0] * r[0]).exp(), r[0]));
        let zero = RealField::zeros(&g);
        let sinks = SinkFields {
            sigma_nl: zero.clone(),
            sigma_l: zero.clone(),
            sigma_l_nc: zero.clone(),
            sigma_c: zero.clone(),
        };
        let report = ContinuityReport::assemble(density(&psi), current(&psi, 1.0, 1.0), sinks, zero);
        let d = corrected_currents(&report, CurrentMode::Nc).unwrap();
        assert_eq!(d.j_tot, d.j);
    }
}
