use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use log::info;
use num_complex::Complex64;
use serde_json::{Map, Number, Value};

use super::config::{InitialState, ScenarioConfig};
use crate::conservation::{continuity_report, corrected_currents, CurrentDecomposition, CurrentMode};
use crate::dynamics::{ground_state, GroundStateOptions, Hamiltonian, Propagator, TimeMode};
use crate::error::{Error, Result};
use crate::fieldlab::{io, ComplexField, Grid};

/// Command-line overrides for a run.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub dump_fields: Option<bool>,
    pub sample_every: Option<usize>,
}

/// Paths written by [`run_scenario`].
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    pub summary: PathBuf,
    pub meta: PathBuf,
    pub summary_json: Value,
}

/// Result of a parse-only consistency check.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub xi: f64,
    pub hbar_eff: f64,
    pub spectral_bound: f64,
    pub hermitian: bool,
}

/// A JSON number with 17 significant digits.
pub fn json_number(v: f64) -> Result<Value> {
    if !v.is_finite() {
        return Err(Error::Numerical(format!("non-finite value {v} in output")));
    }
    Number::from_str(&io::fmt_f64(v))
        .map(Value::Number)
        .map_err(|e| Error::Numerical(e.to_string()))
}

fn obj(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

/// Builds the initial wavefunction, normalized to one.
pub fn initial_state(cfg: &ScenarioConfig, h: &Hamiltonian) -> Result<ComplexField> {
    let grid = &cfg.grid;
    let psi = match &cfg.initial {
        InitialState::GaussianPacket { center, width, momentum } => ComplexField::from_fn(grid, |r| {
            let mut d2 = 0.0;
            let mut phase = 0.0;
            for a in 0..r.len() {
                d2 += (r[a] - center[a]).powi(2);
                phase += momentum[a] * r[a];
            }
            Complex64::from_polar((-d2 / (2.0 * width * width)).exp(), phase)
        }),
        InitialState::LzEigenstate { m, width, relax } => {
            let seed = lz_seed(grid, *m, *width);
            if *relax {
                let opts = GroundStateOptions {
                    sector: Some(*m),
                    residual_tol: Some(1e-9),
                    ..Default::default()
                };
                ground_state(h, &seed.normalized()?, &opts)?.psi
            } else {
                seed
            }
        }
        InitialState::File(path) => {
            let file = File::open(path)
                .map_err(|e| Error::Configuration(format!("cannot open {}: {e}", path.display())))?;
            let psi = io::read_complex(std::io::BufReader::new(file))?;
            grid.ensure_same(psi.grid(), "initial state file")?;
            psi
        }
    };
    psi.normalized()
}

fn lz_seed(grid: &Grid, m: i32, width: f64) -> ComplexField {
    let sign = if m < 0 { -1.0 } else { 1.0 };
    ComplexField::from_fn(grid, |r| {
        let z = Complex64::new(r[0], sign * r[1]);
        z.powi(m.abs()) * (-(r[0] * r[0] + r[1] * r[1]) / (2.0 * width * width)).exp()
    })
}

/// Validates a config beyond parsing: ξ, the Hamiltonian binding and the
/// propagator settings.
pub fn check(cfg: &ScenarioConfig) -> Result<CheckReport> {
    let h = cfg.bind_hamiltonian()?;
    Propagator::new(&h, cfg.dynamics.propagator)?;
    let nc = h.nc();
    Ok(CheckReport {
        xi: nc.xi(),
        hbar_eff: nc.hbar_eff(),
        spectral_bound: h.spectral_bound(),
        hermitian: h.is_hermitian(),
    })
}

fn dump(dir: &Path, name: &str, write: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut out = BufWriter::new(File::create(dir.join(name))?);
    write(&mut out)
}

fn decomposition_json(t: f64, d: &CurrentDecomposition) -> Result<Value> {
    let irreducible = d
        .irreducible
        .iter()
        .map(|s| Ok((s.name.to_string(), json_number(s.integral)?)))
        .collect::<Result<Map<_, _>>>()?;
    Ok(obj(vec![
        ("t", json_number(t)?),
        ("div_Jtot_l2", json_number(d.div_jtot_l2)?),
        ("balance_l2", json_number(d.balance_l2)?),
        ("J_l2", json_number(d.j.l2_norm())?),
        ("J_NL_l2", json_number(d.j_nl.l2_norm())?),
        ("J_L_l2", json_number(d.j_l.l2_norm())?),
        ("kappa_l2", json_number(d.kappa.l2_norm())?),
        ("J_tot_l2", json_number(d.j_tot.l2_norm())?),
        ("irreducible_sinks", Value::Object(irreducible)),
    ]))
}

/// Evolves the scenario, writing `summary.json`, `run_meta.json` and
/// optional field dumps into the output directory.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunArtifacts> {
    let started = Instant::now();
    let out_dir = opts.out_dir.clone().unwrap_or_else(|| cfg.output.out_dir.clone());
    let dump_fields = opts.dump_fields.unwrap_or(cfg.output.dump_fields);
    let sample_every = opts.sample_every.unwrap_or(cfg.output.sample_every);
    if sample_every == 0 {
        return Err(Error::Configuration("sample_every must be at least 1".into()));
    }
    fs::create_dir_all(&out_dir)?;

    let h = cfg.bind_hamiltonian()?;
    let pcfg = cfg.dynamics.propagator;
    let mut prop = Propagator::new(&h, pcfg)?;
    let mode = if h.nc().is_commutative() {
        CurrentMode::Commutative
    } else {
        CurrentMode::Nc
    };
    let dt = pcfg.dt;
    let steps = cfg.dynamics.steps;
    let real_time = pcfg.mode == TimeMode::RealTime;
    info!("running `{}`: {} steps of dt = {dt:e} on {} points", cfg.name, steps, cfg.grid.len());

    let mut psi = initial_state(cfg, &h)?;
    if dump_fields {
        dump(&out_dir, "psi_00000.csv", |w| io::write_complex(w, &psi))?;
    }
    let mut samples = Vec::new();
    let mut final_decomp = Value::Null;
    for n in 1..=steps {
        let next = prop.step(&psi)?;
        let t = n as f64 * dt;
        let sampled = n % sample_every == 0;
        if sampled || (n == steps && real_time) {
            let mut entry = vec![
                ("t", json_number(t)?),
                ("norm", json_number(next.norm_sqr())?),
                ("energy", json_number(h.energy(&next)?.re)?),
            ];
            if real_time {
                let report = continuity_report(&psi, &next, dt, &h)?;
                let decomp = corrected_currents(&report, mode)?;
                let s = report.global_sink_integrals;
                entry.extend([
                    ("residual_l2", json_number(report.residual_l2)?),
                    ("residual_max", json_number(report.residual_max)?),
                    ("div_Jtot_l2", json_number(decomp.div_jtot_l2)?),
                    ("balance_l2", json_number(decomp.balance_l2)?),
                    (
                        "sink_integrals",
                        obj(vec![
                            ("NL", json_number(s.nl)?),
                            ("L", json_number(s.l)?),
                            ("L_nc", json_number(s.l_nc)?),
                            ("C", json_number(s.c)?),
                        ]),
                    ),
                ]);
                if dump_fields && sampled {
                    let tag = format!("{n:05}");
                    dump(&out_dir, &format!("residual_{tag}.csv"), |w| io::write_real(w, &report.residual()))?;
                    for (a, c) in decomp.j_tot.components().iter().enumerate() {
                        dump(&out_dir, &format!("jtot{a}_{tag}.csv"), |w| io::write_real(w, c))?;
                    }
                }
                if n == steps {
                    final_decomp = decomposition_json(t, &decomp)?;
                }
            }
            if sampled {
                samples.push(obj(entry));
                if dump_fields {
                    dump(&out_dir, &format!("psi_{n:05}.csv"), |w| io::write_complex(w, &next))?;
                }
            }
        }
        psi = next;
    }

    let summary_json = obj(vec![
        ("scenario", Value::String(cfg.name.clone())),
        ("samples", Value::Array(samples)),
        ("final", final_decomp),
    ]);
    let summary = out_dir.join("summary.json");
    fs::write(&summary, serde_json::to_string_pretty(&summary_json).map_err(|e| Error::Numerical(e.to_string()))? + "\n")?;

    let meta_json = obj(vec![
        ("scenario", Value::String(cfg.name.clone())),
        ("version", Value::String(env!("CARGO_PKG_VERSION").to_string())),
        ("config", serde_json::to_value(&cfg.source).map_err(|e| Error::Numerical(e.to_string()))?),
        ("steps", Value::from(steps)),
        ("sample_every", Value::from(sample_every)),
        ("threads", Value::from(rayon::current_num_threads())),
        ("wall_time_s", json_number(started.elapsed().as_secs_f64())?),
    ]);
    let meta = out_dir.join("run_meta.json");
    fs::write(&meta, serde_json::to_string_pretty(&meta_json).map_err(|e| Error::Numerical(e.to_string()))? + "\n")?;
    Ok(RunArtifacts {
        out_dir,
        summary,
        meta,
        summary_json,
    })
}
