use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fieldlab::{Boundary, ComplexField, Grid, MAX_DIM};

/// Gaussian tails beyond this many ranges are dropped (relative weight e^{-42}).
const KERNEL_CUTOFF_RANGES: f64 = 6.5;
const SYMMETRY_TOL: f64 = 1e-12;

/// Non-local kernel models `V(r, r')`.
#[derive(Clone, Debug, PartialEq)]
pub enum NonlocalKernelSpec {
    /// `V₀ (πβ²)^{-d/2} exp(−|r − r'|²/β²)`; the local-average factor is the constant `V₀`.
    FrahnLemmer { v0: f64, beta: f64 },
    /// Explicit 1D kernel matrix, row-major `K[r][r']`.
    Tabulated {
        samples: Vec<Complex64>,
        real_symmetric: bool,
    },
}

impl NonlocalKernelSpec {
    pub fn frahn_lemmer(v0: f64, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("non-locality range must be positive, got {beta}")));
        }
        Ok(NonlocalKernelSpec::FrahnLemmer { v0, beta })
    }

    /// Builds a tabulated kernel, checking the symmetry flag against the data.
    pub fn tabulated(samples: Vec<Complex64>, real_symmetric: bool) -> Result<Self> {
        let n = (samples.len() as f64).sqrt().round() as usize;
        if n * n != samples.len() {
            return Err(Error::Shape(format!(
                "tabulated kernel needs N² samples, got {}",
                samples.len()
            )));
        }
        if real_symmetric {
            for i in 0..n {
                for j in 0..n {
                    let a = samples[i * n + j];
                    let b = samples[j * n + i];
                    if a.im.abs() > SYMMETRY_TOL || (a - b).norm() > SYMMETRY_TOL {
                        return Err(Error::Domain(format!(
                            "kernel flagged real-symmetric but K[{i}][{j}] = {a} and K[{j}][{i}] = {b}"
                        )));
                    }
                }
            }
        }
        Ok(NonlocalKernelSpec::Tabulated {
            samples,
            real_symmetric,
        })
    }

    pub fn is_real_symmetric(&self) -> bool {
        match self {
            NonlocalKernelSpec::FrahnLemmer { .. } => true,
            NonlocalKernelSpec::Tabulated { real_symmetric, .. } => *real_symmetric,
        }
    }
}

/// Frahn-Lemmer kernel value for two points of equal dimension.
pub fn frahn_lemmer_eval(r: &[f64], r_prime: &[f64], v0: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("non-locality range must be positive, got {beta}")));
    }
    if r.len() != r_prime.len() || r.is_empty() {
        return Err(Error::Shape("points must share a non-zero dimension".into()));
    }
    let d2: f64 = r.iter().zip(r_prime).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(v0 * gaussian_profile(d2, beta, r.len()))
}

/// Normalized Gaussian `(πβ²)^{-d/2} exp(−s²/β²)`.
fn gaussian_profile(s2: f64, beta: f64, dim: usize) -> f64 {
    (PI * beta * beta).powf(-(dim as f64) / 2.0) * (-s2 / (beta * beta)).exp()
}

/// Momentum-space multiplier `V₀ exp(−k²β²/4)` of the Gaussian kernel.
pub fn momentum_multiplier(v0: f64, beta: f64, k2: f64) -> f64 {
    v0 * (-k2 * beta * beta / 4.0).exp()
}

/// Requires `2·spacing ≤ β ≤ extent/8` on every axis.
pub fn check_resolution(beta: f64, grid: &Grid) -> Result<()> {
    let h = grid.max_spacing();
    if beta < 2.0 * h {
        return Err(Error::Resolution(format!(
            "non-locality range {beta} is below twice the grid spacing {h}"
        )));
    }
    let l = grid.min_extent();
    if beta > l / 8.0 {
        return Err(Error::Resolution(format!(
            "non-locality range {beta} exceeds one eighth of the box extent {l}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
enum KernelData {
    /// Translation-invariant stencil: offset per axis and `H(|s|)·ΔV`.
    Gaussian {
        v0: f64,
        stencil: Vec<([isize; MAX_DIM], f64)>,
    },
    Matrix {
        samples: Vec<Complex64>,
        real_symmetric: bool,
    },
}

/// A non-local kernel bound to a grid, applied by direct quadrature.
///
/// Periodic grids use the minimum-image distance; dirichlet-zero grids drop
/// contributions from outside the box.
#[derive(Clone, Debug)]
pub struct NonlocalOperator {
    grid: Grid,
    data: KernelData,
}

impl NonlocalOperator {
    pub fn bind(spec: &NonlocalKernelSpec, grid: &Grid) -> Result<Self> {
        let data = match spec {
            NonlocalKernelSpec::FrahnLemmer { v0, beta } => {
                if !(*beta > 0.0) {
                    return Err(Error::Domain(format!(
                        "non-locality range must be positive, got {beta}"
                    )));
                }
                check_resolution(*beta, grid)?;
                KernelData::Gaussian {
                    v0: *v0,
                    stencil: gaussian_stencil(*beta, grid),
                }
            }
            NonlocalKernelSpec::Tabulated {
                samples,
                real_symmetric,
            } => {
                if grid.dim() != 1 || samples.len() != grid.len() * grid.len() {
                    return Err(Error::Shape(format!(
                        "tabulated kernel with {} samples does not match a {}-point 1D grid",
                        samples.len(),
                        grid.len()
                    )));
                }
                KernelData::Matrix {
                    samples: samples.clone(),
                    real_symmetric: *real_symmetric,
                }
            }
        };
        Ok(Self {
            grid: grid.clone(),
            data,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn is_real_symmetric(&self) -> bool {
        match &self.data {
            KernelData::Gaussian { .. } => true,
            KernelData::Matrix { real_symmetric, .. } => *real_symmetric,
        }
    }

    /// `Σ_{r'} H(r_c, r') ΔV` at the centre point (without the `V₀` depth).
    pub fn normalization(&self) -> f64 {
        let center: Vec<usize> = self.grid.points().iter().map(|n| n / 2).collect();
        match &self.data {
            KernelData::Gaussian { stencil, .. } => {
                let periodic = self.grid.is_periodic();
                stencil
                    .iter()
                    .filter(|(off, _)| {
                        periodic
                            || (0..self.grid.dim()).all(|a| {
                                let q = center[a] as isize + off[a];
                                q >= 0 && q < self.grid.points()[a] as isize
                            })
                    })
                    .map(|(_, w)| w)
                    .sum()
            }
            KernelData::Matrix { samples, .. } => {
                let n = self.grid.len();
                let c = center[0];
                samples[c * n..(c + 1) * n].iter().map(|v| v.re).sum::<f64>()
                    * self.grid.cell_volume()
            }
        }
    }

    /// `(Kψ)(r) = Σ_{r'} K(r, r') ψ(r') ΔV`.
    pub fn apply(&self, psi: &ComplexField) -> Result<ComplexField> {
        self.grid.ensure_same(psi.grid(), "non-local kernel")?;
        let values = psi.values();
        let out: Vec<Complex64> = match &self.data {
            KernelData::Gaussian { v0, stencil } => {
                let grid = &self.grid;
                let strides = grid.strides();
                let points = grid.points();
                let dim = grid.dim();
                let periodic = grid.boundary() == Boundary::Periodic;
                (0..grid.len())
                    .into_par_iter()
                    .map(|flat| {
                        let idx = grid.multi_index(flat);
                        let mut acc = Complex64::default();
                        'offsets: for (off, w) in stencil {
                            let mut q = 0usize;
                            for a in 0..dim {
                                let n = points[a] as isize;
                                let mut j = idx[a] as isize + off[a];
                                if j < 0 || j >= n {
                                    if !periodic {
                                        continue 'offsets;
                                    }
                                    j = j.rem_euclid(n);
                                }
                                q += j as usize * strides[a];
                            }
                            acc += values[q] * *w;
                        }
                        acc * *v0
                    })
                    .collect()
            }
            KernelData::Matrix { samples, .. } => {
                let n = self.grid.len();
                let dv = self.grid.cell_volume();
                (0..n)
                    .into_par_iter()
                    .map(|i| {
                        samples[i * n..(i + 1) * n]
                            .iter()
                            .zip(values)
                            .fold(Complex64::default(), |acc, (k, v)| acc + k * v)
                            * dv
                    })
                    .collect()
            }
        };
        Ok(ComplexField::from_raw(&self.grid, out))
    }
}

fn gaussian_stencil(beta: f64, grid: &Grid) -> Vec<([isize; MAX_DIM], f64)> {
    let dim = grid.dim();
    let cutoff = KERNEL_CUTOFF_RANGES * beta;
    let dv = grid.cell_volume();
    let ranges: Vec<(isize, isize)> = (0..dim)
        .map(|a| {
            let n = grid.points()[a] as isize;
            let reach = (cutoff / grid.spacing()[a]).floor() as isize;
            match grid.boundary() {
                // Each periodic residue appears once, at its minimum-image offset.
                Boundary::Periodic => ((-(n - 1) / 2).max(-reach), (n / 2).min(reach)),
                Boundary::DirichletZero => ((-(n - 1)).max(-reach), (n - 1).min(reach)),
            }
        })
        .collect();
    let mut stencil = Vec::new();
    let mut off = [0isize; MAX_DIM];
    for a in 0..dim {
        off[a] = ranges[a].0;
    }
    loop {
        let s2: f64 = (0..dim)
            .map(|a| (off[a] as f64 * grid.spacing()[a]).powi(2))
            .sum();
        if s2 <= cutoff * cutoff {
            stencil.push((off, gaussian_profile(s2, beta, dim) * dv));
        }
        let mut axis = dim;
        loop {
            if axis == 0 {
                return stencil;
            }
            axis -= 1;
            if off[axis] < ranges[axis].1 {
                off[axis] += 1;
                break;
            }
            off[axis] = ranges[axis].0;
        }
    }
}

/// `∫ H(|r_c − r'|) dr'` at the grid centre; 1 up to quadrature error for a
/// resolved Frahn-Lemmer kernel.
pub fn kernel_normalization(kernel: &NonlocalKernelSpec, grid: &Grid) -> Result<f64> {
    Ok(NonlocalOperator::bind(kernel, grid)?.normalization())
}

/// Applies the kernel to `psi` by direct quadrature.
pub fn apply_nonlocal(kernel: &NonlocalKernelSpec, psi: &ComplexField) -> Result<ComplexField> {
    NonlocalOperator::bind(kernel, psi.grid())?.apply(psi)
}

/// Applies the Gaussian kernel as the momentum multiplier `V₀ exp(−k²β²/4)`.
pub fn apply_nonlocal_momentum(v0: f64, beta: f64, psi: &ComplexField) -> Result<ComplexField> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("non-locality range must be positive, got {beta}")));
    }
    psi.apply_k2_multiplier(|k2| momentum_multiplier(v0, beta, k2))
}
