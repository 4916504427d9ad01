#![allow(dead_code)]

use std::path::PathBuf;

use nonloc::{Complex64, ComplexField, Grid, RealField};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn scenarios_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

/// Sum of a few randomly placed, randomly boosted Gaussian packets with
/// random complex amplitudes. Decays to round-off well before the box edge.
pub fn random_smooth(grid: &Grid, seed: u64) -> ComplexField {
    let mut rng = StdRng::seed_from_u64(seed);
    let dim = grid.dim();
    let l = grid.min_extent();
    let packets: Vec<(Complex64, Vec<f64>, Vec<f64>, f64)> = (0..4)
        .map(|_| {
            let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let center = (0..dim).map(|_| rng.gen_range(-0.05..0.05) * l).collect();
            let k = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let width = rng.gen_range(0.045..0.06) * l;
            (amp, center, k, width)
        })
        .collect();
    ComplexField::from_fn(grid, |r| {
        packets
            .iter()
            .map(|(amp, c, k, w)| {
                let d2: f64 = r.iter().zip(c).map(|(x, c)| (x - c).powi(2)).sum();
                let phase: f64 = r.iter().zip(k).map(|(x, k)| x * k).sum();
                amp * Complex64::from_polar((-d2 / (2.0 * w * w)).exp(), phase)
            })
            .sum()
    })
}

pub fn gaussian_packet(grid: &Grid, center: &[f64], width: f64, k: &[f64]) -> ComplexField {
    ComplexField::from_fn(grid, |r| {
        let d2: f64 = r.iter().zip(center).map(|(x, c)| (x - c).powi(2)).sum();
        let phase: f64 = r.iter().zip(k).map(|(x, k)| x * k).sum();
        Complex64::from_polar((-d2 / (2.0 * width * width)).exp(), phase)
    })
}

pub fn diff_l2(a: &ComplexField, b: &ComplexField) -> f64 {
    a.axpy(Complex64::new(-1.0, 0.0), b).unwrap().l2_norm()
}

pub fn diff_max(a: &ComplexField, b: &ComplexField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn real_diff_max(a: &RealField, b: &RealField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
