//! Python bindings: grids, complex fields, Hamiltonians, time stepping,
//! continuity diagnostics and scenario runs.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use nonloc::conservation::{continuity_report, corrected_currents, CurrentMode};
use nonloc::dynamics::{
    fl_expansion_error, fl_nc_coefficients, ground_state, GroundStateOptions, Hamiltonian,
    Propagator, PropagatorConfig,
};
use nonloc::ncalgebra::NcParams;
use nonloc::potentials::{dispersion_solve, kernel_normalization, NonlocalKernelSpec};
use nonloc::scenario::{self, RunOptions, ScenarioConfig};
use nonloc::{Boundary, ComplexField, Error};

fn to_py(err: Error) -> PyErr {
    if err.is_config_error() {
        PyValueError::new_err(err.to_string())
    } else {
        PyRuntimeError::new_err(err.to_string())
    }
}

#[pyclass(name = "Grid", frozen, from_py_object)]
#[derive(Clone)]
struct PyGrid {
    inner: nonloc::Grid,
}

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (points, extent, boundary = "periodic"))]
    fn new(points: Vec<usize>, extent: Vec<f64>, boundary: &str) -> PyResult<Self> {
        let b: Boundary = boundary.parse().map_err(to_py)?;
        let inner = nonloc::Grid::new(&points, &extent, b).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn points(&self) -> Vec<usize> {
        self.inner.points().to_vec()
    }

    #[getter]
    fn extent(&self) -> Vec<f64> {
        self.inner.extent().to_vec()
    }

    #[getter]
    fn spacing(&self) -> Vec<f64> {
        self.inner.spacing().to_vec()
    }

    #[getter]
    fn boundary(&self) -> &'static str {
        self.inner.boundary().as_str()
    }

    fn coordinates(&self, axis: usize) -> PyResult<Vec<f64>> {
        if axis >= self.inner.dim() {
            return Err(PyValueError::new_err(format!("axis {axis} out of range")));
        }
        Ok(self.inner.axis_coordinates(axis))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(points={:?}, extent={:?}, boundary='{}')",
            self.inner.points(),
            self.inner.extent(),
            self.inner.boundary()
        )
    }
}

/// Complex field on a grid, row-major with the last axis fastest.
#[pyclass(name = "Field", frozen, from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: ComplexField,
}

#[pymethods]
impl PyField {
    #[new]
    fn new(grid: &PyGrid, values: Vec<Complex64>) -> PyResult<Self> {
        let inner = ComplexField::from_values(&grid.inner, values).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid {
            inner: self.inner.grid().clone(),
        }
    }

    fn values(&self) -> Vec<Complex64> {
        self.inner.values().to_vec()
    }

    fn density(&self) -> Vec<f64> {
        nonloc::conservation::density(&self.inner).into_values()
    }

    fn norm_sqr(&self) -> f64 {
        self.inner.norm_sqr()
    }

    fn normalized(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.normalized().map_err(to_py)?,
        })
    }

    fn gradient(&self, axis: usize) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.gradient(axis).map_err(to_py)?,
        })
    }

    fn laplacian(&self) -> Self {
        Self {
            inner: self.inner.laplacian(),
        }
    }

    /// Probability current components `(ħ/m) Im(ψ*∇ψ)`.
    #[pyo3(signature = (mass = 1.0, hbar = 1.0))]
    fn current(&self, mass: f64, hbar: f64) -> Vec<Vec<f64>> {
        nonloc::conservation::current(&self.inner, mass, hbar)
            .components()
            .iter()
            .map(|c| c.values().to_vec())
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.grid().len()
    }
}

/// A scenario file, exposing its Hamiltonian for stepping and diagnostics.
#[pyclass(name = "Scenario", frozen)]
struct PyScenario {
    cfg: ScenarioConfig,
    h: Hamiltonian,
}

impl PyScenario {
    fn from_cfg(cfg: ScenarioConfig) -> PyResult<Self> {
        let h = cfg.bind_hamiltonian().map_err(to_py)?;
        Ok(Self { cfg, h })
    }

    fn propagator_config(&self, dt: Option<f64>) -> PropagatorConfig {
        let mut p = self.cfg.dynamics.propagator;
        if let Some(dt) = dt {
            p.dt = dt;
        }
        p
    }
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        Self::from_cfg(scenario::parse_config(&path).map_err(to_py)?)
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Self::from_cfg(scenario::parse_config_str(text, Path::new(".")).map_err(to_py)?)
    }

    #[getter]
    fn name(&self) -> String {
        self.cfg.name.clone()
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid {
            inner: self.cfg.grid.clone(),
        }
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.cfg.dynamics.propagator.dt
    }

    #[getter]
    fn steps(&self) -> usize {
        self.cfg.dynamics.steps
    }

    #[getter]
    fn xi(&self) -> f64 {
        self.h.nc().xi()
    }

    fn is_hermitian(&self) -> bool {
        self.h.is_hermitian()
    }

    fn initial_state(&self) -> PyResult<PyField> {
        Ok(PyField {
            inner: scenario::initial_state(&self.cfg, &self.h).map_err(to_py)?,
        })
    }

    fn apply_hamiltonian(&self, psi: &PyField) -> PyResult<PyField> {
        Ok(PyField {
            inner: self.h.apply(&psi.inner).map_err(to_py)?,
        })
    }

    fn energy(&self, psi: &PyField) -> PyResult<Complex64> {
        self.h.energy(&psi.inner).map_err(to_py)
    }

    /// Advances `psi` by `n` steps of the configured propagator.
    #[pyo3(signature = (psi, n = 1, dt = None))]
    fn evolve(&self, py: Python<'_>, psi: &PyField, n: usize, dt: Option<f64>) -> PyResult<PyField> {
        let cfg = self.propagator_config(dt);
        let h = &self.h;
        let start = psi.inner.clone();
        let out = py
            .detach(move || -> nonloc::Result<ComplexField> {
                let mut prop = Propagator::new(h, cfg)?;
                let mut psi = start;
                for _ in 0..n {
                    psi = prop.step(&psi)?;
                }
                Ok(psi)
            })
            .map_err(to_py)?;
        Ok(PyField { inner: out })
    }

    /// Continuity balance between two snapshots one step apart.
    #[pyo3(signature = (psi_prev, psi_next, dt = None))]
    fn continuity<'py>(
        &self,
        py: Python<'py>,
        psi_prev: &PyField,
        psi_next: &PyField,
        dt: Option<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let dt = dt.unwrap_or(self.cfg.dynamics.propagator.dt);
        let report = continuity_report(&psi_prev.inner, &psi_next.inner, dt, &self.h).map_err(to_py)?;
        let mode = if self.h.nc().is_commutative() {
            CurrentMode::Commutative
        } else {
            CurrentMode::Nc
        };
        let decomp = corrected_currents(&report, mode).map_err(to_py)?;
        let s = report.global_sink_integrals;
        let d = PyDict::new(py);
        d.set_item("residual_l2", report.residual_l2)?;
        d.set_item("residual_max", report.residual_max)?;
        d.set_item("naive_residual_l2", report.naive_residual().l2_norm())?;
        d.set_item("div_Jtot_l2", decomp.div_jtot_l2)?;
        d.set_item("balance_l2", decomp.balance_l2)?;
        let sinks = PyDict::new(py);
        sinks.set_item("NL", s.nl)?;
        sinks.set_item("L", s.l)?;
        sinks.set_item("L_nc", s.l_nc)?;
        sinks.set_item("C", s.c)?;
        d.set_item("sink_integrals", sinks)?;
        Ok(d)
    }

    /// Imaginary-time ground state, optionally in an `L_z` sector `m (mod 4)`.
    #[pyo3(signature = (psi, sector = None, residual_tol = None))]
    fn ground_state(&self, psi: &PyField, sector: Option<i32>, residual_tol: Option<f64>) -> PyResult<(PyField, f64)> {
        let opts = GroundStateOptions {
            sector,
            residual_tol,
            ..Default::default()
        };
        let gs = ground_state(&self.h, &psi.inner, &opts).map_err(to_py)?;
        Ok((PyField { inner: gs.psi }, gs.energy))
    }

    /// Full run; returns the summary as a JSON string.
    #[pyo3(signature = (out_dir, dump_fields = false))]
    fn run(&self, py: Python<'_>, out_dir: PathBuf, dump_fields: bool) -> PyResult<String> {
        let opts = RunOptions {
            out_dir: Some(out_dir),
            dump_fields: Some(dump_fields),
            sample_every: None,
        };
        let cfg = &self.cfg;
        let art = py.detach(move || scenario::run_scenario(cfg, &opts)).map_err(to_py)?;
        Ok(art.summary_json.to_string())
    }
}

/// Real roots of the Gaussian non-local dispersion relation.
#[pyfunction]
#[pyo3(signature = (energy, v0, beta, mass = 1.0, hbar = 1.0))]
fn dispersion(energy: f64, v0: f64, beta: f64, mass: f64, hbar: f64) -> PyResult<Vec<f64>> {
    dispersion_solve(energy, v0, beta, mass, hbar).map_err(to_py)
}

/// Quadrature weight of the Frahn-Lemmer kernel on a grid (1 when resolved).
#[pyfunction]
fn frahn_lemmer_normalization(grid: &PyGrid, beta: f64) -> PyResult<f64> {
    let k = NonlocalKernelSpec::frahn_lemmer(1.0, beta).map_err(to_py)?;
    kernel_normalization(&k, &grid.inner).map_err(to_py)
}

/// `(a, b)` of the gradient-expanded non-commutative Frahn-Lemmer operator.
#[pyfunction]
#[pyo3(signature = (v0, beta, mass = 1.0, hbar = 1.0))]
fn fl_coefficients(v0: f64, beta: f64, mass: f64, hbar: f64) -> (f64, f64) {
    fl_nc_coefficients(v0, beta, mass, hbar)
}

#[pyfunction]
#[pyo3(signature = (psi, v0, beta, hbar = 1.0))]
fn fl_error(psi: &PyField, v0: f64, beta: f64, hbar: f64) -> PyResult<f64> {
    fl_expansion_error(&psi.inner, v0, beta, &NcParams::commutative(hbar)).map_err(to_py)
}

/// Signed `ξ = Tr(Θη)/4ħ²`; raises for `|ξ| ≥ 1`.
#[pyfunction]
fn nc_xi(theta: [f64; 3], eta: [f64; 3], hbar: f64) -> PyResult<f64> {
    Ok(NcParams::new(theta, eta, hbar).map_err(to_py)?.xi())
}

#[pymodule]
fn nonloc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(dispersion, m)?)?;
    m.add_function(wrap_pyfunction!(frahn_lemmer_normalization, m)?)?;
    m.add_function(wrap_pyfunction!(fl_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(fl_error, m)?)?;
    m.add_function(wrap_pyfunction!(nc_xi, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
