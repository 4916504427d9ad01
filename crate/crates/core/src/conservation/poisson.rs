use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fieldlab::spectral::{self, Wavenumbers};
use crate::fieldlab::{Boundary, RealField};
use crate::linalg::conjugate_gradient;

/// Absolute tolerance on `∫source dV` for periodic solves, scaled by `max(1, ∫|source|)`.
pub const COMPATIBILITY_TOL: f64 = 1e-8;
const CG_TOL: f64 = 1e-12;

/// Solves `∇²χ = −source`.
///
/// Periodic grids invert spectrally in the zero-mean gauge and require a
/// source with vanishing integral. Dirichlet-zero grids run conjugate
/// gradients on the finite-difference Laplacian.
pub fn poisson_solve(source: &RealField) -> Result<RealField> {
    let grid = source.grid();
    match grid.boundary() {
        Boundary::Periodic => {
            let integral = source.integrate();
            let abs: f64 = source.values().iter().map(|v| v.abs()).sum::<f64>() * grid.cell_volume();
            let tolerance = COMPATIBILITY_TOL * abs.max(1.0);
            if integral.abs() > tolerance {
                return Err(Error::Compatibility { integral, tolerance });
            }
            let mut hat: Vec<Complex64> = source.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
            spectral::forward(&mut hat, grid);
            let k2 = Wavenumbers::new(grid).k_squared(grid);
            hat.iter_mut().zip(&k2).for_each(|(v, &k)| {
                *v = if k == 0.0 { Complex64::default() } else { *v / k };
            });
            spectral::inverse(&mut hat, grid);
            RealField::from_values(grid, hat.into_iter().map(|v| v.re).collect())
        }
        Boundary::DirichletZero => {
            let apply = |x: &[f64]| -> Vec<f64> {
                let f = RealField::from_raw(grid, x.to_vec());
                f.laplacian().into_values().into_iter().map(|v| -v).collect()
            };
            let mut x = vec![0.0; grid.len()];
            conjugate_gradient(apply, source.values(), &mut x, CG_TOL, 20 * grid.len() + 100)?;
            RealField::from_values(grid, x)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::Grid;

    #[test]
    fn sine_inverts_to_itself() {
        let g = Grid::periodic(&[64], &[2.0 * std::f64::consts::PI]).unwrap();
        let s = RealField::from_fn(&g, |r| r[0].sin());
        let chi = poisson_solve(&s).unwrap();
        assert!(chi.sub(&s).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn zero_source_gives_zero() {
        let g = Grid::periodic(&[8, 8], &[1.0, 1.0]).unwrap();
        assert!(poisson_solve(&RealField::zeros(&g)).unwrap().is_zero());
        let d = Grid::dirichlet(&[8], &[1.0]).unwrap();
        assert!(poisson_solve(&RealField::zeros(&d)).unwrap().is_zero());
    }

    #[test]
    fn incompatible_periodic_source_is_rejected() {
        let g = Grid::periodic(&[16], &[4.0]).unwrap();
        let s = RealField::from_fn(&g, |_| 1.0);
        assert!(matches!(poisson_solve(&s), Err(Error::Compatibility { .. })));
    }

    #[test]
    fn dirichlet_round_trip() {
        let g = Grid::dirichlet(&[40, 30], &[4.0, 3.0]).unwrap();
        let s = RealField::from_fn(&g, |r| (-(r[0] * r[0] + 2.0 * r[1] * r[1])).exp() + 0.3);
        let chi = poisson_solve(&s).unwrap();
        let back = chi.laplacian().add(&s).unwrap();
        assert!(back.max_abs() < 1e-9 * s.max_abs().max(1.0));
    }
}
