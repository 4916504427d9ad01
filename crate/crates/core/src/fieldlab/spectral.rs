//! Multi-dimensional FFT built from axis-wise 1D transforms.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::grid::Grid;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized in-place transform over every axis of `grid`.
pub(crate) fn fft_nd(values: &mut [Complex64], grid: &Grid, direction: FftDirection) {
    debug_assert_eq!(values.len(), grid.len());
    let strides = grid.strides();
    for axis in 0..grid.dim() {
        let n = grid.points()[axis];
        let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction));
        let stride = strides[axis];
        if stride == 1 {
            fft.process(values);
            continue;
        }
        let block = stride * n;
        let mut line = vec![Complex64::default(); n];
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        for start in (0..values.len()).step_by(block) {
            for inner in 0..stride {
                let base = start + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = values[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    values[base + j * stride] = *v;
                }
            }
        }
    }
}

pub(crate) fn forward(values: &mut [Complex64], grid: &Grid) {
    fft_nd(values, grid, FftDirection::Forward);
}

/// Inverse transform including the 1/N factor.
pub(crate) fn inverse(values: &mut [Complex64], grid: &Grid) {
    fft_nd(values, grid, FftDirection::Inverse);
    let scale = 1.0 / values.len() as f64;
    values.iter_mut().for_each(|v| *v *= scale);
}

/// Per-axis wavenumber tables, plus a copy with the Nyquist bin zeroed for
/// odd-order derivatives.
pub(crate) struct Wavenumbers {
    pub k: Vec<Vec<f64>>,
    pub k_odd: Vec<Vec<f64>>,
}

impl Wavenumbers {
    pub fn new(grid: &Grid) -> Self {
        let k: Vec<Vec<f64>> = (0..grid.dim()).map(|a| grid.wavenumbers(a)).collect();
        let k_odd = k
            .iter()
            .zip(grid.points())
            .map(|(ks, &n)| {
                let mut ks = ks.clone();
                if n % 2 == 0 {
                    ks[n / 2] = 0.0;
                }
                ks
            })
            .collect();
        Self { k, k_odd }
    }

    /// |k|² at every flat index.
    pub fn k_squared(&self, grid: &Grid) -> Vec<f64> {
        (0..grid.len())
            .map(|flat| {
                let idx = grid.multi_index(flat);
                (0..grid.dim()).map(|a| self.k[a][idx[a]].powi(2)).sum()
            })
            .collect()
    }
}
