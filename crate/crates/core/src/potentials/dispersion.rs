use crate::error::{Error, Result};

use super::nonlocal::momentum_multiplier;

/// Sign-bracketing scan resolution on `[0, k_max]`.
const SCAN_INTERVALS: usize = 20_000;

/// `E − (ħk)²/2m − V₀ exp(−k²β²/4)`.
pub fn dispersion_residual(k: f64, energy: f64, v0: f64, beta: f64, mass: f64, hbar: f64) -> f64 {
    energy - (hbar * k).powi(2) / (2.0 * mass) - momentum_multiplier(v0, beta, k * k)
}

/// Upper end of the root search, `4·sqrt(2m·max(|E|, |V₀|, 1))/ħ`.
pub fn dispersion_k_max(energy: f64, v0: f64, mass: f64, hbar: f64) -> f64 {
    4.0 * (2.0 * mass * energy.abs().max(v0.abs()).max(1.0)).sqrt() / hbar
}

/// All non-negative wavenumbers solving the Gaussian-kernel dispersion
/// relation, ascending. An empty list means no sign change was found.
pub fn dispersion_solve(energy: f64, v0: f64, beta: f64, mass: f64, hbar: f64) -> Result<Vec<f64>> {
    for (name, v) in [("E", energy), ("V0", v0), ("beta", beta), ("m", mass), ("hbar", hbar)] {
        if !v.is_finite() {
            return Err(Error::Domain(format!("{name} must be finite")));
        }
    }
    if mass <= 0.0 || hbar <= 0.0 {
        return Err(Error::Domain("mass and hbar must be positive".into()));
    }
    let f = |k: f64| dispersion_residual(k, energy, v0, beta, mass, hbar);
    let k_max = dispersion_k_max(energy, v0, mass, hbar);
    let dk = k_max / SCAN_INTERVALS as f64;

    let mut roots = Vec::new();
    let mut k_lo = 0.0;
    let mut f_lo = f(k_lo);
    if f_lo == 0.0 {
        roots.push(0.0);
    }
    for i in 1..=SCAN_INTERVALS {
        let k_hi = if i == SCAN_INTERVALS { k_max } else { i as f64 * dk };
        let f_hi = f(k_hi);
        if f_hi == 0.0 {
            roots.push(k_hi);
        } else if f_lo != 0.0 && f_lo.signum() != f_hi.signum() {
            roots.push(bisect(&f, k_lo, k_hi, f_lo));
        }
        k_lo = k_hi;
        f_lo = f_hi;
    }
    Ok(roots)
}

/// Bisection down to adjacent floating-point values.
fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_particle() {
        let roots = dispersion_solve(0.5, 0.0, 0.85, 1.0, 1.0).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k_zero_root_when_energy_equals_depth() {
        for beta in [0.3, 0.85, 2.0] {
            let roots = dispersion_solve(1.3, 1.3, beta, 1.0, 1.0).unwrap();
            assert_eq!(roots[0], 0.0);
        }
    }

    #[test]
    fn rejects_non_finite_and_non_positive() {
        assert!(dispersion_solve(f64::NAN, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(dispersion_solve(1.0, 1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn no_sign_change_gives_empty() {
        // E below the k=0 value and the residual only decreases.
        assert!(dispersion_solve(0.9, 1.0, 0.85, 1.0, 1.0).unwrap().is_empty());
    }
}
