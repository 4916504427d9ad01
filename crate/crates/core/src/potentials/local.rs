use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fieldlab::{ComplexField, Grid};

/// Analytic local potential models.
#[derive(Clone, Debug, PartialEq)]
pub enum LocalPotentialSpec {
    None,
    /// `V = h·x` along the first axis.
    Linear { h: f64 },
    /// `V = ½ m ω² |r|²`.
    Harmonic { omega: f64, mass: f64 },
    /// `V = −depth · exp(−|r|²/(2 width²))`.
    GaussianWell { depth: f64, width: f64 },
    /// `V = −i W₀` inside an axis-aligned box (`None` = whole grid), zero outside.
    ComplexAbsorber {
        w0: f64,
        region: Option<Vec<(f64, f64)>>,
    },
}

impl LocalPotentialSpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            LocalPotentialSpec::Harmonic { mass, .. } if *mass <= 0.0 => {
                Err(Error::Domain("harmonic potential needs a positive mass".into()))
            }
            LocalPotentialSpec::GaussianWell { width, .. } if *width <= 0.0 => {
                Err(Error::Domain("gaussian-well width must be positive".into()))
            }
            LocalPotentialSpec::ComplexAbsorber { w0, region } => {
                if *w0 < 0.0 {
                    return Err(Error::Domain("absorber strength W0 must be non-negative".into()));
                }
                if let Some(region) = region {
                    if region.len() != dim {
                        return Err(Error::Shape(format!(
                            "absorber region has {} intervals for a {dim}-dimensional grid",
                            region.len()
                        )));
                    }
                    if region.iter().any(|(lo, hi)| lo > hi) {
                        return Err(Error::Domain("absorber region interval with lo > hi".into()));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, LocalPotentialSpec::None)
    }
}

/// A sampled local potential together with its spatial gradient.
#[derive(Clone, Debug)]
pub struct LocalPotential {
    value: ComplexField,
    gradient: Vec<ComplexField>,
}

impl LocalPotential {
    /// Wraps an arbitrary sampled potential, differentiating it numerically.
    pub fn from_field(value: ComplexField) -> Self {
        let gradient = value.gradients();
        Self { value, gradient }
    }

    pub fn from_parts(value: ComplexField, gradient: Vec<ComplexField>) -> Result<Self> {
        if gradient.len() != value.grid().dim() {
            return Err(Error::Shape("one gradient component per axis required".into()));
        }
        for g in &gradient {
            value.grid().ensure_same(g.grid(), "potential gradient")?;
        }
        Ok(Self { value, gradient })
    }

    pub fn value(&self) -> &ComplexField {
        &self.value
    }

    pub fn gradient(&self) -> &[ComplexField] {
        &self.gradient
    }

    pub fn grid(&self) -> &Grid {
        self.value.grid()
    }

    /// True when the imaginary part vanishes everywhere.
    pub fn is_real(&self) -> bool {
        self.value.values().iter().all(|v| v.im == 0.0)
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.iter().any(|g| g.values().iter().any(|v| *v != Complex64::default()))
    }
}

/// Samples a local potential on `grid`. Gradients are analytic, so they stay
/// exact for potentials that are not periodic over the box.
pub fn eval_local(spec: &LocalPotentialSpec, grid: &Grid) -> Result<LocalPotential> {
    spec.validate(grid.dim())?;
    let dim = grid.dim();
    let zero_grad = || (0..dim).map(|_| ComplexField::zeros(grid)).collect::<Vec<_>>();
    let re = |v: f64| Complex64::new(v, 0.0);
    let r2 = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();
    let (value, gradient) = match spec {
        LocalPotentialSpec::None => (ComplexField::zeros(grid), zero_grad()),
        LocalPotentialSpec::Linear { h } => {
            let h = *h;
            let value = ComplexField::from_fn(grid, |r| re(h * r[0]));
            let mut grad = zero_grad();
            grad[0] = ComplexField::from_fn(grid, |_| re(h));
            (value, grad)
        }
        LocalPotentialSpec::Harmonic { omega, mass } => {
            let k = mass * omega * omega;
            let value = ComplexField::from_fn(grid, |r| re(0.5 * k * r2(r)));
            let grad = (0..dim)
                .map(|a| ComplexField::from_fn(grid, |r| re(k * r[a])))
                .collect();
            (value, grad)
        }
        LocalPotentialSpec::GaussianWell { depth, width } => {
            let s = 2.0 * width * width;
            let value = ComplexField::from_fn(grid, |r| re(-depth * (-r2(r) / s).exp()));
            let grad = (0..dim)
                .map(|a| {
                    ComplexField::from_fn(grid, |r| {
                        re(depth * (-r2(r) / s).exp() * 2.0 * r[a] / s)
                    })
                })
                .collect();
            (value, grad)
        }
        LocalPotentialSpec::ComplexAbsorber { w0, region } => {
            let inside = |r: &[f64]| match region {
                None => true,
                Some(b) => r.iter().zip(b).all(|(x, (lo, hi))| *x >= *lo && *x <= *hi),
            };
            let value = ComplexField::from_fn(grid, |r| {
                if inside(r) {
                    Complex64::new(0.0, -w0)
                } else {
                    Complex64::default()
                }
            });
            // Piecewise constant: the gradient is zero away from the region edges.
            (value, zero_grad())
        }
    };
    LocalPotential::from_parts(value, gradient)
}
