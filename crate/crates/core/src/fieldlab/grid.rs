use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Maximum number of spatial axes.
pub const MAX_DIM: usize = 3;

const MIN_POINTS_PER_AXIS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    DirichletZero,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::DirichletZero => "dirichlet-zero",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "dirichlet-zero" | "dirichlet" => Ok(Boundary::DirichletZero),
            other => Err(Error::Parse(format!("unknown boundary `{other}`"))),
        }
    }
}

/// Uniform Cartesian grid centred on the origin.
///
/// Periodic axes sample `x_j = -L/2 + j*h` with `h = L/N`. Dirichlet-zero
/// axes store only interior points `x_j = -L/2 + (j+1)*h` with
/// `h = L/(N+1)`; the field vanishes on the walls at `±L/2`.
///
/// Values are stored row-major: the last axis varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    points: [usize; MAX_DIM],
    extent: [f64; MAX_DIM],
    spacing: [f64; MAX_DIM],
    boundary: Boundary,
}

impl Grid {
    pub fn new(points: &[usize], extent: &[f64], boundary: Boundary) -> Result<Self> {
        let dim = points.len();
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::Domain(format!("grid dimension must be 1..=3, got {dim}")));
        }
        if extent.len() != dim {
            return Err(Error::Shape(format!(
                "{dim} point counts but {} extents",
                extent.len()
            )));
        }
        let mut p = [1usize; MAX_DIM];
        let mut e = [1.0f64; MAX_DIM];
        let mut h = [1.0f64; MAX_DIM];
        let mut total: usize = 1;
        for axis in 0..dim {
            if points[axis] < MIN_POINTS_PER_AXIS {
                return Err(Error::Domain(format!(
                    "axis {axis} has {} points; at least {MIN_POINTS_PER_AXIS} required",
                    points[axis]
                )));
            }
            if !(extent[axis].is_finite() && extent[axis] > 0.0) {
                return Err(Error::Domain(format!(
                    "axis {axis} extent must be positive and finite, got {}",
                    extent[axis]
                )));
            }
            total = total.checked_mul(points[axis]).ok_or_else(|| {
                Error::Domain("total grid point count overflows".to_string())
            })?;
            p[axis] = points[axis];
            e[axis] = extent[axis];
            h[axis] = match boundary {
                Boundary::Periodic => extent[axis] / points[axis] as f64,
                Boundary::DirichletZero => extent[axis] / (points[axis] + 1) as f64,
            };
        }
        if total > isize::MAX as usize / 16 {
            return Err(Error::Domain(format!("grid with {total} points is too large")));
        }
        Ok(Self {
            dim,
            points: p,
            extent: e,
            spacing: h,
            boundary,
        })
    }

    pub fn periodic(points: &[usize], extent: &[f64]) -> Result<Self> {
        Self::new(points, extent, Boundary::Periodic)
    }

    pub fn dirichlet(points: &[usize], extent: &[f64]) -> Result<Self> {
        Self::new(points, extent, Boundary::DirichletZero)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[usize] {
        &self.points[..self.dim]
    }

    pub fn extent(&self) -> &[f64] {
        &self.extent[..self.dim]
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.dim]
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn len(&self) -> usize {
        self.points().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing().iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_extent(&self) -> f64 {
        self.extent().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Flat-index stride of each axis.
    pub fn strides(&self) -> [usize; MAX_DIM] {
        let mut s = [0usize; MAX_DIM];
        let mut acc = 1;
        for axis in (0..self.dim).rev() {
            s[axis] = acc;
            acc *= self.points[axis];
        }
        s
    }

    pub fn coordinate(&self, axis: usize, index: usize) -> f64 {
        let offset = match self.boundary {
            Boundary::Periodic => index as f64,
            Boundary::DirichletZero => (index + 1) as f64,
        };
        -0.5 * self.extent[axis] + offset * self.spacing[axis]
    }

    /// Coordinates of every sample along one axis.
    pub fn axis_coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.points[axis])
            .map(|i| self.coordinate(axis, i))
            .collect()
    }

    pub fn multi_index(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0usize; MAX_DIM];
        for axis in (0..self.dim).rev() {
            idx[axis] = flat % self.points[axis];
            flat /= self.points[axis];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let strides = self.strides();
        idx.iter()
            .take(self.dim)
            .zip(strides.iter())
            .map(|(i, s)| i * s)
            .sum()
    }

    /// Position of a flat sample; unused axes are zero.
    pub fn position(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let mut r = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            r[axis] = self.coordinate(axis, idx[axis]);
        }
        r
    }

    /// Angular wavenumbers in FFT order along one axis (periodic grids).
    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        let n = self.points[axis];
        let dk = 2.0 * PI / self.extent[axis];
        (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j as isize } else { j as isize - n as isize };
                // The lone Nyquist bin of an even grid is reported with positive sign.
                m as f64 * dk
            })
            .collect()
    }

    /// Largest |k| representable on the grid, summed in quadrature over axes.
    pub fn max_wavenumber_sq(&self) -> f64 {
        self.spacing().iter().map(|h| (PI / h).powi(2)).sum()
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self == other
    }

    pub(crate) fn ensure_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!("{what}: fields live on different grids")))
        }
    }

    pub(crate) fn require_periodic(&self, op: &'static str) -> Result<()> {
        if self.is_periodic() {
            Ok(())
        } else {
            Err(Error::UnsupportedBoundary(op))
        }
    }

    pub(crate) fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.dim {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "axis {axis} out of range for a {}-dimensional grid",
                self.dim
            )))
        }
    }
}
