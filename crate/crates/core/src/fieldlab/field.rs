use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::grid::{Boundary, Grid};
use super::spectral::{self, Wavenumbers};
use crate::error::{Error, Result};

/// Complex scalar sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

/// Real scalar sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

/// One real component per grid axis.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: Vec<RealField>,
}

fn check_len(grid: &Grid, len: usize) -> Result<()> {
    if len == grid.len() {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "{len} values supplied for a grid of {} points",
            grid.len()
        )))
    }
}

impl ComplexField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        check_len(grid, values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("field contains non-finite values".into()));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    /// Samples `f(position)` at every grid point.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|i| f(&grid.position(i)[..grid.dim()]))
            .collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub(crate) fn from_raw(grid: &Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_raw(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(
        &self,
        other: &ComplexField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.grid.ensure_same(&other.grid, "zip_map")?;
        Ok(Self::from_raw(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|v| v * s)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// `self + s * other`
    pub fn axpy(&self, s: Complex64, other: &ComplexField) -> Result<Self> {
        self.zip_map(other, |a, b| a + s * b)
    }

    pub fn real_part(&self) -> RealField {
        RealField::from_raw(&self.grid, self.values.iter().map(|v| v.re).collect())
    }

    pub fn imag_part(&self) -> RealField {
        RealField::from_raw(&self.grid, self.values.iter().map(|v| v.im).collect())
    }

    pub fn norm_sqr_field(&self) -> RealField {
        RealField::from_raw(&self.grid, self.values.iter().map(|v| v.norm_sqr()).collect())
    }

    /// ∫ f dV.
    pub fn integrate(&self) -> Complex64 {
        let dv = self.grid.cell_volume();
        self.values.iter().fold(Complex64::default(), |acc, v| acc + v) * dv
    }

    /// ⟨self, other⟩ = ∫ conj(self)·other dV.
    pub fn inner(&self, other: &ComplexField) -> Result<Complex64> {
        self.grid.ensure_same(&other.grid, "inner product")?;
        let s = self
            .values
            .iter()
            .zip(&other.values)
            .fold(Complex64::default(), |acc, (a, b)| acc + a.conj() * b);
        Ok(s * self.grid.cell_volume())
    }

    /// ∫ |f|² dV.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    /// Square root of ∫ |f|² dV.
    pub fn l2_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Rescales to unit L2 norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.l2_norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Numerical(format!("cannot normalize field with norm {n}")));
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    /// Partial derivative along `axis`: spectral on periodic grids, second-order
    /// central differences with zero walls otherwise.
    pub fn gradient(&self, axis: usize) -> Result<Self> {
        self.grid.check_axis(axis)?;
        Ok(match self.grid.boundary() {
            Boundary::Periodic => {
                let mut hat = self.values.clone();
                spectral::forward(&mut hat, &self.grid);
                let wk = Wavenumbers::new(&self.grid);
                spectral_derivative(&self.grid, &hat, &wk, axis)
            }
            Boundary::DirichletZero => Self::from_raw(
                &self.grid,
                central_difference(&self.grid, &self.values, axis),
            ),
        })
    }

    /// All partial derivatives, sharing one forward transform on periodic grids.
    pub fn gradients(&self) -> Vec<ComplexField> {
        match self.grid.boundary() {
            Boundary::Periodic => {
                let mut hat = self.values.clone();
                spectral::forward(&mut hat, &self.grid);
                let wk = Wavenumbers::new(&self.grid);
                (0..self.grid.dim())
                    .map(|a| spectral_derivative(&self.grid, &hat, &wk, a))
                    .collect()
            }
            Boundary::DirichletZero => (0..self.grid.dim())
                .map(|a| Self::from_raw(&self.grid, central_difference(&self.grid, &self.values, a)))
                .collect(),
        }
    }

    pub fn laplacian(&self) -> Self {
        match self.grid.boundary() {
            Boundary::Periodic => {
                let mut hat = self.values.clone();
                spectral::forward(&mut hat, &self.grid);
                let k2 = Wavenumbers::new(&self.grid).k_squared(&self.grid);
                hat.iter_mut().zip(&k2).for_each(|(v, k)| *v *= -k);
                spectral::inverse(&mut hat, &self.grid);
                Self::from_raw(&self.grid, hat)
            }
            Boundary::DirichletZero => {
                Self::from_raw(&self.grid, fd_laplacian(&self.grid, &self.values))
            }
        }
    }

    /// Unitary DFT (1/√N on both directions).
    pub fn to_momentum(&self) -> Result<Self> {
        self.grid.require_periodic("to_momentum")?;
        let mut hat = self.values.clone();
        spectral::forward(&mut hat, &self.grid);
        let s = 1.0 / (hat.len() as f64).sqrt();
        hat.iter_mut().for_each(|v| *v *= s);
        Ok(Self::from_raw(&self.grid, hat))
    }

    pub fn from_momentum(&self) -> Result<Self> {
        self.grid.require_periodic("from_momentum")?;
        let mut x = self.values.clone();
        spectral::inverse(&mut x, &self.grid);
        let s = (x.len() as f64).sqrt();
        x.iter_mut().for_each(|v| *v *= s);
        Ok(Self::from_raw(&self.grid, x))
    }

    /// Multiplies by a real function of |k|² in momentum space.
    pub fn apply_k2_multiplier(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.grid.require_periodic("momentum multiplier")?;
        let mut hat = self.values.clone();
        spectral::forward(&mut hat, &self.grid);
        let k2 = Wavenumbers::new(&self.grid).k_squared(&self.grid);
        hat.iter_mut().zip(&k2).for_each(|(v, &k)| *v *= f(k));
        spectral::inverse(&mut hat, &self.grid);
        Ok(Self::from_raw(&self.grid, hat))
    }
}

fn spectral_derivative(
    grid: &Grid,
    hat: &[Complex64],
    wk: &Wavenumbers,
    axis: usize,
) -> ComplexField {
    let stride = grid.strides()[axis];
    let n = grid.points()[axis];
    let k = &wk.k_odd[axis];
    let mut out: Vec<Complex64> = hat
        .iter()
        .enumerate()
        .map(|(flat, v)| v * Complex64::new(0.0, k[(flat / stride) % n]))
        .collect();
    spectral::inverse(&mut out, grid);
    ComplexField::from_raw(grid, out)
}

fn central_difference<T>(grid: &Grid, values: &[T], axis: usize) -> Vec<T>
where
    T: Copy + Default + Sub<Output = T> + Mul<f64, Output = T>,
{
    let stride = grid.strides()[axis];
    let n = grid.points()[axis];
    let inv = 0.5 / grid.spacing()[axis];
    (0..values.len())
        .map(|flat| {
            let j = (flat / stride) % n;
            let plus = if j + 1 < n { values[flat + stride] } else { T::default() };
            let minus = if j > 0 { values[flat - stride] } else { T::default() };
            (plus - minus) * inv
        })
        .collect()
}

fn fd_laplacian<T>(grid: &Grid, values: &[T]) -> Vec<T>
where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let strides = grid.strides();
    let mut out = vec![T::default(); values.len()];
    for axis in 0..grid.dim() {
        let stride = strides[axis];
        let n = grid.points()[axis];
        let inv = 1.0 / grid.spacing()[axis].powi(2);
        for (flat, o) in out.iter_mut().enumerate() {
            let j = (flat / stride) % n;
            let plus = if j + 1 < n { values[flat + stride] } else { T::default() };
            let minus = if j > 0 { values[flat - stride] } else { T::default() };
            *o = *o + (plus + minus - values[flat] * 2.0) * inv;
        }
    }
    out
}

impl RealField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        check_len(grid, values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("field contains non-finite values".into()));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| f(&grid.position(i)[..grid.dim()]))
            .collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub(crate) fn from_raw(grid: &Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid, "zip_map")?;
        Ok(Self::from_raw(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn add(&self, other: &RealField) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RealField) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField::from_raw(
            &self.grid,
            self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Riemann sum times cell volume. On dirichlet-zero grids this coincides
    /// with the trapezoid rule because the wall samples are zero.
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Square root of ∫ f² dV.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn gradient(&self, axis: usize) -> Result<Self> {
        self.grid.check_axis(axis)?;
        Ok(match self.grid.boundary() {
            Boundary::Periodic => self.to_complex().gradient(axis)?.real_part(),
            Boundary::DirichletZero => {
                Self::from_raw(&self.grid, central_difference(&self.grid, &self.values, axis))
            }
        })
    }

    pub fn gradient_vector(&self) -> VectorField {
        let components = match self.grid.boundary() {
            Boundary::Periodic => self
                .to_complex()
                .gradients()
                .iter()
                .map(ComplexField::real_part)
                .collect(),
            Boundary::DirichletZero => (0..self.grid.dim())
                .map(|a| Self::from_raw(&self.grid, central_difference(&self.grid, &self.values, a)))
                .collect(),
        };
        VectorField {
            grid: self.grid.clone(),
            components,
        }
    }

    pub fn laplacian(&self) -> Self {
        match self.grid.boundary() {
            Boundary::Periodic => self.to_complex().laplacian().real_part(),
            Boundary::DirichletZero => {
                Self::from_raw(&self.grid, fd_laplacian(&self.grid, &self.values))
            }
        }
    }
}

impl VectorField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            components: (0..grid.dim()).map(|_| RealField::zeros(grid)).collect(),
        }
    }

    pub fn from_components(grid: &Grid, components: Vec<RealField>) -> Result<Self> {
        if components.len() != grid.dim() {
            return Err(Error::Shape(format!(
                "{} components for a {}-dimensional grid",
                components.len(),
                grid.dim()
            )));
        }
        for c in &components {
            grid.ensure_same(c.grid(), "vector component")?;
        }
        Ok(Self {
            grid: grid.clone(),
            components,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> &[RealField] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &RealField {
        &self.components[axis]
    }

    pub fn add(&self, other: &VectorField) -> Result<Self> {
        self.grid.ensure_same(&other.grid, "vector add")?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: self.grid.clone(),
            components,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            components: self.components.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(RealField::is_zero)
    }

    /// Sum of per-axis derivatives of the components.
    pub fn divergence(&self) -> RealField {
        let mut acc = vec![0.0; self.grid.len()];
        for (axis, c) in self.components.iter().enumerate() {
            let d = c.gradient(axis).expect("component axis within grid");
            acc.iter_mut().zip(d.values()).for_each(|(a, v)| *a += v);
        }
        RealField::from_raw(&self.grid, acc)
    }

    /// Square root of ∫ |v|² dV.
    pub fn l2_norm(&self) -> f64 {
        let dv = self.grid.cell_volume();
        (self
            .components
            .iter()
            .flat_map(|c| c.values().iter().map(|v| v * v))
            .sum::<f64>()
            * dv)
            .sqrt()
    }
}
