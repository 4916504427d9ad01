//! TOML scenario files.
//!
//! Every section is read by consuming its keys; whatever remains is
//! reported as unknown. Problems are collected across the whole file and
//! returned together.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::dynamics::{Hamiltonian, HamiltonianSpec, NonlocalPath, PropagatorConfig, Scheme, TimeMode};
use crate::error::{Error, Result};
use crate::fieldlab::{Boundary, Grid};
use crate::ncalgebra::{presets, NcParams};
use crate::potentials::{check_resolution, LocalPotentialSpec, NonlocalKernelSpec};

/// `ħ` in MeV·fm (with `c = 1`) and the nucleon mass in MeV.
pub const FM_MEV_HBAR: f64 = 197.3269804;
pub const FM_MEV_MASS: f64 = 938.2720813;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// `exp(−|r − c|²/(2w²) + i k·r)`, normalized.
    GaussianPacket {
        center: Vec<f64>,
        width: f64,
        momentum: Vec<f64>,
    },
    /// `(x ± iy)^{|m|} exp(−r²/(2w²))`; with `relax` it is then driven to the
    /// lowest state of the `m (mod 4)` sector by imaginary-time descent.
    LzEigenstate { m: i32, width: f64, relax: bool },
    /// A complex field dump.
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsSection {
    pub steps: usize,
    pub propagator: PropagatorConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSection {
    pub sample_every: usize,
    pub dump_fields: bool,
    pub out_dir: PathBuf,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub name: String,
    pub grid: Grid,
    pub hamiltonian: HamiltonianSpec,
    pub dynamics: DynamicsSection,
    pub initial: InitialState,
    pub output: OutputSection,
    /// The parsed file, echoed into run metadata.
    pub source: Table,
}

impl ScenarioConfig {
    pub fn bind_hamiltonian(&self) -> Result<Hamiltonian> {
        Hamiltonian::bind(&self.hamiltonian, &self.grid)
    }
}

struct Section {
    name: &'static str,
    table: Table,
}

impl Section {
    fn new(root: &mut Table, name: &'static str, errs: &mut Vec<String>) -> Self {
        let table = match root.remove(name) {
            None => Table::new(),
            Some(Value::Table(t)) => t,
            Some(other) => {
                errs.push(format!("{name}: expected a table, found {}", other.type_str()));
                Table::new()
            }
        };
        Self { name, table }
    }

    fn present(&self) -> bool {
        !self.table.is_empty()
    }

    fn has(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.table.remove(key)
    }

    fn bad(&self, errs: &mut Vec<String>, key: &str, msg: impl std::fmt::Display) {
        errs.push(format!("{}.{key}: {msg}", self.name));
    }

    fn f64(&mut self, key: &str, errs: &mut Vec<String>) -> Option<f64> {
        match self.take(key)? {
            Value::Float(f) => Some(f),
            Value::Integer(i) => Some(i as f64),
            other => {
                self.bad(errs, key, format!("expected a number, found {}", other.type_str()));
                None
            }
        }
    }

    fn int(&mut self, key: &str, errs: &mut Vec<String>) -> Option<i64> {
        match self.take(key)? {
            Value::Integer(i) => Some(i),
            other => {
                self.bad(errs, key, format!("expected an integer, found {}", other.type_str()));
                None
            }
        }
    }

    fn count(&mut self, key: &str, errs: &mut Vec<String>) -> Option<usize> {
        let v = self.int(key, errs)?;
        if v < 0 {
            self.bad(errs, key, format!("must be non-negative, got {v}"));
            return None;
        }
        Some(v as usize)
    }

    fn string(&mut self, key: &str, errs: &mut Vec<String>) -> Option<String> {
        match self.take(key)? {
            Value::String(s) => Some(s),
            other => {
                self.bad(errs, key, format!("expected a string, found {}", other.type_str()));
                None
            }
        }
    }

    fn boolean(&mut self, key: &str, errs: &mut Vec<String>) -> Option<bool> {
        match self.take(key)? {
            Value::Boolean(b) => Some(b),
            other => {
                self.bad(errs, key, format!("expected a boolean, found {}", other.type_str()));
                None
            }
        }
    }

    /// A number or an array of numbers.
    fn numbers(&mut self, key: &str, errs: &mut Vec<String>) -> Option<Vec<f64>> {
        let v = self.take(key)?;
        let as_num = |v: &Value| match v {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        };
        match &v {
            Value::Array(items) => {
                let out: Option<Vec<f64>> = items.iter().map(as_num).collect();
                if out.is_none() {
                    self.bad(errs, key, "expected an array of numbers");
                }
                out
            }
            other => match as_num(other) {
                Some(x) => Some(vec![x]),
                None => {
                    self.bad(errs, key, format!("expected a number or array, found {}", other.type_str()));
                    None
                }
            },
        }
    }

    fn parsed<T: std::str::FromStr<Err = Error>>(&mut self, key: &str, errs: &mut Vec<String>) -> Option<T> {
        let s = self.string(key, errs)?;
        match s.parse() {
            Ok(v) => Some(v),
            Err(e) => {
                self.bad(errs, key, e);
                None
            }
        }
    }

    fn finish(self, errs: &mut Vec<String>) {
        for key in self.table.keys() {
            errs.push(format!("{}.{key}: unknown key", self.name));
        }
    }
}

fn broadcast(v: Vec<f64>, dim: usize, what: &str, errs: &mut Vec<String>) -> Option<Vec<f64>> {
    if v.len() == dim {
        Some(v)
    } else if v.len() == 1 {
        Some(vec![v[0]; dim])
    } else {
        errs.push(format!("{what}: expected 1 or {dim} values, found {}", v.len()));
        None
    }
}

/// Byte offset to 1-based line and column.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn parse_toml(text: &str) -> Result<Table> {
    text.parse::<Table>().map_err(|e| {
        let msg = e.message().trim().to_string();
        match e.span() {
            Some(span) => {
                let (line, col) = line_col(text, span.start);
                Error::Parse(format!("line {line}, column {col}: {msg}"))
            }
            None => Error::Parse(msg),
        }
    })
}

/// Reads and validates a scenario file. Relative paths inside it resolve
/// against the file's directory.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Configuration(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config_str(&text, base)
}

pub fn parse_config_str(text: &str, base_dir: &Path) -> Result<ScenarioConfig> {
    let source = parse_toml(text)?;
    let mut root = source.clone();
    let mut errs = Vec::new();

    let name = match root.remove("name") {
        None => "scenario".to_string(),
        Some(Value::String(s)) => s,
        Some(other) => {
            errs.push(format!("name: expected a string, found {}", other.type_str()));
            String::new()
        }
    };

    let mut grid_s = Section::new(&mut root, "grid", &mut errs);
    let mut units = Section::new(&mut root, "units", &mut errs);
    let mut local_s = Section::new(&mut root, "local", &mut errs);
    let mut nonlocal_s = Section::new(&mut root, "nonlocal", &mut errs);
    let mut nc_s = Section::new(&mut root, "nc", &mut errs);
    let mut dyn_s = Section::new(&mut root, "dynamics", &mut errs);
    let mut init_s = Section::new(&mut root, "initial", &mut errs);
    let mut out_s = Section::new(&mut root, "output", &mut errs);
    for key in root.keys() {
        errs.push(format!("{key}: unknown section"));
    }

    // [grid]
    let dim = match grid_s.count("dim", &mut errs) {
        Some(d @ 1..=3) => d,
        Some(d) => {
            grid_s.bad(&mut errs, "dim", format!("must be 1, 2 or 3, got {d}"));
            1
        }
        None => {
            if !grid_s.has("dim") {
                errs.push("grid.dim: required".into());
            }
            1
        }
    };
    let points = match grid_s.take("points") {
        None => {
            errs.push("grid.points: required".into());
            None
        }
        Some(v) => {
            let items = match v {
                Value::Array(a) => a,
                other => vec![other],
            };
            let pts: Option<Vec<usize>> = items
                .iter()
                .map(|v| v.as_integer().filter(|i| *i > 0).map(|i| i as usize))
                .collect();
            match pts {
                Some(p) => broadcast(p.iter().map(|&v| v as f64).collect(), dim, "grid.points", &mut errs)
                    .map(|p| p.into_iter().map(|v| v as usize).collect::<Vec<_>>()),
                None => {
                    errs.push("grid.points: expected positive integers".into());
                    None
                }
            }
        }
    };
    let extent = match grid_s.numbers("extent", &mut errs) {
        Some(v) => broadcast(v, dim, "grid.extent", &mut errs),
        None => {
            if !errs.iter().any(|e| e.starts_with("grid.extent")) {
                errs.push("grid.extent: required".into());
            }
            None
        }
    };
    let boundary = grid_s.parsed::<Boundary>("boundary", &mut errs).unwrap_or(Boundary::Periodic);
    grid_s.finish(&mut errs);
    let grid = match (points, extent) {
        (Some(p), Some(e)) => match Grid::new(&p, &e, boundary) {
            Ok(g) => Some(g),
            Err(err) => {
                errs.push(format!("grid: {err}"));
                None
            }
        },
        _ => None,
    };

    // [units]
    let (mut hbar, mut mass) = (None, None);
    if let Some(preset) = units.string("preset", &mut errs) {
        match preset.as_str() {
            "natural" => {
                hbar = Some(1.0);
                mass = Some(1.0);
            }
            "fm-mev" => {
                hbar = Some(FM_MEV_HBAR);
                mass = Some(FM_MEV_MASS);
            }
            other => units.bad(&mut errs, "preset", format!("unknown preset `{other}` (natural, fm-mev)")),
        }
    }
    let units_hbar = units.f64("hbar", &mut errs);
    if units_hbar.is_some() {
        hbar = units_hbar;
    }
    if let Some(m) = units.f64("mass", &mut errs) {
        mass = Some(m);
    }
    units.finish(&mut errs);

    // [nc]
    let mut theta = [0.0; 3];
    let mut eta = [0.0; 3];
    let mut nc_hbar_default = None;
    if let Some(preset) = nc_s.string("preset", &mut errs) {
        match preset.as_str() {
            "paper-bounds" | "experimental-bounds" => {
                theta[2] = presets::THETA_BOUND_SI;
                eta[2] = presets::ETA_BOUND_SI;
                nc_hbar_default = Some(presets::HBAR_SI);
            }
            other => nc_s.bad(
                &mut errs,
                "preset",
                format!("unknown preset `{other}` (paper-bounds, experimental-bounds)"),
            ),
        }
    }
    for (key, target) in [("theta", &mut theta), ("eta", &mut eta)] {
        if let Some(v) = nc_s.numbers(key, &mut errs) {
            if v.len() == 3 {
                target.copy_from_slice(&v);
            } else {
                nc_s.bad(&mut errs, key, format!("expected [x, y, z], found {} values", v.len()));
            }
        }
    }
    if let Some(t) = nc_s.f64("theta_z", &mut errs) {
        theta[2] = t;
    }
    if let Some(e) = nc_s.f64("eta_z", &mut errs) {
        eta[2] = e;
    }
    let nc_hbar = nc_s.f64("hbar", &mut errs);
    nc_s.finish(&mut errs);
    if let (Some(a), Some(b)) = (units_hbar, nc_hbar) {
        if a != b {
            errs.push(format!("nc.hbar: {b} disagrees with units.hbar = {a}"));
        }
    }
    let hbar = units_hbar.or(nc_hbar).or(nc_hbar_default).or(hbar).unwrap_or(1.0);
    let mass = mass.unwrap_or(1.0);
    if !(hbar > 0.0 && hbar.is_finite()) {
        errs.push(format!("units.hbar: must be positive, got {hbar}"));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        errs.push(format!("units.mass: must be positive, got {mass}"));
    }
    let nc = match NcParams::new(theta, eta, if hbar > 0.0 { hbar } else { 1.0 }) {
        Ok(nc) => {
            if let Err(e) = nc.check_dim(dim) {
                errs.push(format!(
                    "nc: non-commutativity on a {dim}-dimensional grid is limited to {}: {e}",
                    match dim {
                        1 => "theta = eta = 0",
                        2 => "the z components",
                        _ => "any components",
                    }
                ));
            }
            Some(nc)
        }
        Err(e) => {
            errs.push(format!("nc: {e}"));
            None
        }
    };

    // [local]
    let local = if local_s.present() {
        let kind = local_s.string("kind", &mut errs).unwrap_or_else(|| {
            errs.push("local.kind: required".into());
            "none".into()
        });
        let spec = match kind.as_str() {
            "none" => Some(LocalPotentialSpec::None),
            "linear" => Some(LocalPotentialSpec::Linear {
                h: local_s.f64("h", &mut errs).unwrap_or(0.0),
            }),
            "harmonic" => Some(LocalPotentialSpec::Harmonic {
                omega: local_s.f64("omega", &mut errs).unwrap_or(1.0),
                mass,
            }),
            "gaussian-well" => Some(LocalPotentialSpec::GaussianWell {
                depth: local_s.f64("depth", &mut errs).unwrap_or(1.0),
                width: local_s.f64("width", &mut errs).unwrap_or(1.0),
            }),
            "complex-absorber" => {
                let w0 = local_s.f64("W0", &mut errs).unwrap_or(0.0);
                let region = match local_s.take("region") {
                    None => None,
                    Some(Value::Array(items)) => {
                        let pairs: Option<Vec<(f64, f64)>> = items
                            .iter()
                            .map(|it| {
                                let a = it.as_array()?;
                                let num = |v: &Value| v.as_float().or(v.as_integer().map(|i| i as f64));
                                match a.as_slice() {
                                    [lo, hi] => Some((num(lo)?, num(hi)?)),
                                    _ => None,
                                }
                            })
                            .collect();
                        if pairs.is_none() {
                            errs.push("local.region: expected [[lo, hi], ...] per axis".into());
                        }
                        pairs
                    }
                    Some(_) => {
                        errs.push("local.region: expected [[lo, hi], ...] per axis".into());
                        None
                    }
                };
                Some(LocalPotentialSpec::ComplexAbsorber { w0, region })
            }
            other => {
                local_s.bad(
                    &mut errs,
                    "kind",
                    format!("unknown kind `{other}` (none, linear, harmonic, gaussian-well, complex-absorber)"),
                );
                None
            }
        };
        if let Some(s) = &spec {
            if let Err(e) = s.validate(dim) {
                errs.push(format!("local: {e}"));
            }
        }
        spec.unwrap_or(LocalPotentialSpec::None)
    } else {
        LocalPotentialSpec::None
    };
    local_s.finish(&mut errs);

    // [nonlocal]
    let nonlocal = if nonlocal_s.present() {
        let kind = nonlocal_s.string("kind", &mut errs).unwrap_or_else(|| "frahn-lemmer".into());
        match kind.as_str() {
            "none" => None,
            "frahn-lemmer" => {
                let v0 = nonlocal_s.f64("V0", &mut errs).unwrap_or(0.0);
                let beta = nonlocal_s.f64("beta", &mut errs);
                if beta.is_none() && !errs.iter().any(|e| e.starts_with("nonlocal.beta")) {
                    errs.push("nonlocal.beta: required".into());
                }
                beta.and_then(|b| match NonlocalKernelSpec::frahn_lemmer(v0, b) {
                    Ok(k) => Some(k),
                    Err(e) => {
                        errs.push(format!("nonlocal.beta: {e}"));
                        None
                    }
                })
            }
            other => {
                nonlocal_s.bad(&mut errs, "kind", format!("unknown kind `{other}` (none, frahn-lemmer)"));
                None
            }
        }
    } else {
        None
    };
    nonlocal_s.finish(&mut errs);
    if let (Some(NonlocalKernelSpec::FrahnLemmer { beta, .. }), Some(g)) = (&nonlocal, &grid) {
        if let Err(e) = check_resolution(*beta, g) {
            errs.push(format!("nonlocal.beta: {e}"));
        }
    }

    // [dynamics]
    let dt = dyn_s.f64("dt", &mut errs).unwrap_or(1e-3);
    let steps = dyn_s.count("steps", &mut errs).unwrap_or(0);
    let mode = dyn_s.parsed::<TimeMode>("mode", &mut errs).unwrap_or_default();
    let scheme = dyn_s.parsed::<Scheme>("scheme", &mut errs).unwrap_or_default();
    let path = dyn_s.parsed::<NonlocalPath>("nonlocal_path", &mut errs).unwrap_or_default();
    let solver_tol = dyn_s.f64("solver_tol", &mut errs).unwrap_or(crate::dynamics::DEFAULT_SOLVER_TOL);
    let max_iters = dyn_s.count("max_iters", &mut errs).unwrap_or(crate::dynamics::DEFAULT_MAX_ITERS);
    dyn_s.finish(&mut errs);
    let propagator = PropagatorConfig {
        dt,
        mode,
        scheme,
        solver_tol,
        max_iters,
    };
    if let Err(e) = propagator.validate() {
        errs.push(format!("dynamics: {e}"));
    }

    // [initial]
    let initial = {
        let kind = init_s.string("kind", &mut errs).unwrap_or_else(|| "gaussian-packet".into());
        match kind.as_str() {
            "gaussian-packet" => {
                let center = init_s
                    .numbers("center", &mut errs)
                    .and_then(|v| broadcast(v, dim, "initial.center", &mut errs))
                    .unwrap_or_else(|| vec![0.0; dim]);
                let momentum = init_s
                    .numbers("momentum", &mut errs)
                    .and_then(|v| broadcast(v, dim, "initial.momentum", &mut errs))
                    .unwrap_or_else(|| vec![0.0; dim]);
                let width = init_s.f64("width", &mut errs).unwrap_or(1.0);
                if !(width > 0.0) {
                    errs.push(format!("initial.width: must be positive, got {width}"));
                }
                Some(InitialState::GaussianPacket { center, width, momentum })
            }
            "lz-eigenstate" => {
                if dim != 2 {
                    errs.push("initial.kind: lz-eigenstate needs a 2D grid".into());
                }
                let m = init_s.int("m", &mut errs).unwrap_or(1);
                let width = init_s.f64("width", &mut errs).unwrap_or(1.0);
                let relax = init_s.boolean("relax", &mut errs).unwrap_or(false);
                if !(width > 0.0) {
                    errs.push(format!("initial.width: must be positive, got {width}"));
                }
                Some(InitialState::LzEigenstate {
                    m: m.clamp(i32::MIN as i64, i32::MAX as i64) as i32,
                    width,
                    relax,
                })
            }
            "file" => match init_s.string("path", &mut errs) {
                Some(p) => Some(InitialState::File(base_dir.join(p))),
                None => {
                    errs.push("initial.path: required for kind = \"file\"".into());
                    None
                }
            },
            other => {
                init_s.bad(
                    &mut errs,
                    "kind",
                    format!("unknown kind `{other}` (gaussian-packet, lz-eigenstate, file)"),
                );
                None
            }
        }
    };
    init_s.finish(&mut errs);

    // [output]
    let sample_every = out_s.count("sample_every", &mut errs).unwrap_or(1);
    if sample_every == 0 {
        errs.push("output.sample_every: must be at least 1".into());
    }
    let dump_fields = out_s.boolean("dump_fields", &mut errs).unwrap_or(false);
    let out_dir = out_s.string("out_dir", &mut errs).map_or_else(|| PathBuf::from("out"), PathBuf::from);
    out_s.finish(&mut errs);

    let hamiltonian = nc.map(|nc| HamiltonianSpec {
        mass,
        hbar,
        local,
        nonlocal: nonlocal.clone(),
        nc,
        nonlocal_path: path,
    });
    if let (Some(h), Some(g)) = (&hamiltonian, &grid) {
        if errs.is_empty() {
            if let Err(e) = Hamiltonian::bind(h, g) {
                errs.push(format!("hamiltonian: {e}"));
            }
        }
    }

    if !errs.is_empty() {
        // Keep the report stable and free of repeats.
        let mut seen = BTreeSet::new();
        errs.retain(|e| seen.insert(e.clone()));
        return Err(Error::Validation(errs));
    }
    Ok(ScenarioConfig {
        name,
        grid: grid.expect("validated"),
        hamiltonian: hamiltonian.expect("validated"),
        dynamics: DynamicsSection { steps, propagator },
        initial: initial.expect("validated"),
        output: OutputSection {
            sample_every,
            dump_fields,
            out_dir,
        },
        source,
    })
}
