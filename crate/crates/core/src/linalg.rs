//! Matrix-free Krylov solvers on flat vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug)]
pub(crate) struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .fold(Complex64::default(), |acc, (x, y)| acc + x.conj() * y)
}

fn cnorm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// BiCGSTAB for `A x = b` with `A` supplied as a closure.
///
/// Converges when `‖b − A x‖ ≤ tol·‖b‖`; `x` holds the initial guess on
/// entry and the solution on exit.
pub(crate) fn bicgstab(
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    b: &[Complex64],
    x: &mut [Complex64],
    tol: f64,
    max_iters: usize,
) -> Result<SolveStats> {
    let bnorm = cnorm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = Complex64::default());
        return Ok(SolveStats {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let ax = apply(x);
    let mut r: Vec<Complex64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut rel = cnorm(&r) / bnorm;
    if rel <= tol {
        return Ok(SolveStats {
            iterations: 0,
            relative_residual: rel,
        });
    }
    let r_hat = r.clone();
    let mut rho = Complex64::new(1.0, 0.0);
    let mut alpha = Complex64::new(1.0, 0.0);
    let mut omega = Complex64::new(1.0, 0.0);
    let n = b.len();
    let mut v = vec![Complex64::default(); n];
    let mut p = vec![Complex64::default(); n];

    for it in 1..=max_iters {
        let rho_new = cdot(&r_hat, &r);
        if rho_new.norm() == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        v = apply(&p);
        alpha = rho / cdot(&r_hat, &v);
        let s: Vec<Complex64> = r.iter().zip(&v).map(|(r, v)| r - alpha * v).collect();
        if cnorm(&s) / bnorm <= tol {
            for i in 0..n {
                x[i] += alpha * p[i];
            }
            return Ok(SolveStats {
                iterations: it,
                relative_residual: cnorm(&s) / bnorm,
            });
        }
        let t = apply(&s);
        let tt = cdot(&t, &t).re;
        omega = if tt > 0.0 { cdot(&t, &s) / tt } else { Complex64::default() };
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        rel = cnorm(&r) / bnorm;
        if rel <= tol {
            return Ok(SolveStats {
                iterations: it,
                relative_residual: rel,
            });
        }
        if omega.norm() == 0.0 {
            break;
        }
    }
    // Recompute the true residual before giving up.
    let ax = apply(x);
    let rel_true = cnorm(&b.iter().zip(&ax).map(|(b, a)| b - a).collect::<Vec<_>>()) / bnorm;
    if rel_true <= tol {
        return Ok(SolveStats {
            iterations: max_iters,
            relative_residual: rel_true,
        });
    }
    Err(Error::Iteration {
        solver: "BiCGSTAB",
        iterations: max_iters,
        residual: rel_true,
    })
}

/// Conjugate gradients for a symmetric positive-definite operator.
pub(crate) fn conjugate_gradient(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iters: usize,
) -> Result<SolveStats> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveStats {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let ax = apply(x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for it in 0..=max_iters {
        let rel = rr.sqrt() / bnorm;
        if rel <= tol {
            return Ok(SolveStats {
                iterations: it,
                relative_residual: rel,
            });
        }
        if it == max_iters {
            break;
        }
        let ap = apply(&p);
        let alpha = rr / dot(&p, &ap);
        for i in 0..b.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..b.len() {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(Error::Iteration {
        solver: "conjugate gradient",
        iterations: max_iters,
        residual: rr.sqrt() / bnorm,
    })
}
