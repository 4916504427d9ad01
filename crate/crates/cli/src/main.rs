use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use clap::{Parser, Subcommand};
use log::error;
use serde_json::json;

use nonloc::fieldlab::io::fmt_f64;
use nonloc::potentials::dispersion_solve;
use nonloc::scenario::{check, parse_config, run_scenario, RunOptions};
use nonloc::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "nonloc", version, about = "Non-local and non-commutative wavefunction dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evolve one or more scenarios and write summary.json / run_meta.json.
    Simulate {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Output directory (per-scenario subdirectories when several configs are given).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Write field CSVs at every sample.
        #[arg(long)]
        dump_fields: bool,
        #[arg(long, value_name = "N")]
        sample_every: Option<usize>,
        /// Run up to N scenarios at once, each in its own process.
        #[arg(long, value_name = "N", default_value_t = 1)]
        jobs: usize,
    },
    /// Validate a scenario without computing anything.
    Check { config: PathBuf },
    /// Real roots k of E = ħ²k²/2m + V₀ exp(−k²β²/4), as CSV.
    Dispersion {
        #[arg(long = "E", allow_negative_numbers = true)]
        energy: f64,
        #[arg(long = "V0", allow_negative_numbers = true)]
        v0: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
    },
}

fn fail(err: &Error) -> ExitCode {
    let details = match err {
        Error::Validation(list) => list.clone(),
        _ => Vec::new(),
    };
    let body = json!({
        "error": {
            "kind": err.kind(),
            "message": err.to_string(),
            "details": details,
        }
    });
    error!("{err}");
    eprintln!("{body}");
    ExitCode::from(if err.is_config_error() { EXIT_CONFIG } else { EXIT_NUMERICAL })
}

fn simulate_one(config: &Path, opts: &RunOptions) -> Result<PathBuf, Error> {
    let cfg = parse_config(config)?;
    Ok(run_scenario(&cfg, opts)?.summary)
}

fn stem(config: &Path) -> String {
    config.file_stem().map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned())
}

/// Runs each config in a child process, at most `jobs` at a time. Returns the
/// worst exit code.
fn simulate_batch(configs: &[PathBuf], out_dir: Option<&Path>, extra: &[String], jobs: usize) -> ExitCode {
    let exe = match std::env::current_exe() {
        Ok(p) => p,
        Err(e) => return fail(&Error::Io(e)),
    };
    let mut worst = 0u8;
    for chunk in configs.chunks(jobs.max(1)) {
        let children: Vec<_> = chunk
            .iter()
            .map(|cfg| {
                let mut cmd = Command::new(&exe);
                cmd.arg("simulate").arg(cfg).args(extra);
                if let Some(dir) = out_dir {
                    cmd.arg("--out-dir").arg(dir.join(stem(cfg)));
                }
                (cfg, cmd.spawn())
            })
            .collect();
        for (cfg, child) in children {
            let code = match child.and_then(|mut c| c.wait()) {
                Ok(status) => status.code().unwrap_or(EXIT_NUMERICAL as i32) as u8,
                Err(e) => {
                    eprintln!("{}", json!({"error": {"kind": "io", "message": format!("{}: {e}", cfg.display())}}));
                    EXIT_NUMERICAL
                }
            };
            worst = worst.max(code);
        }
    }
    ExitCode::from(worst)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NONLOC_LOG", "warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Cmd::Simulate {
            configs,
            out_dir,
            dump_fields,
            sample_every,
            jobs,
        } => {
            if configs.len() > 1 {
                let mut extra = Vec::new();
                if dump_fields {
                    extra.push("--dump-fields".to_string());
                }
                if let Some(n) = sample_every {
                    extra.extend(["--sample-every".to_string(), n.to_string()]);
                }
                return simulate_batch(&configs, out_dir.as_deref(), &extra, jobs);
            }
            let opts = RunOptions {
                out_dir,
                dump_fields: dump_fields.then_some(true),
                sample_every,
            };
            match simulate_one(&configs[0], &opts) {
                Ok(summary) => {
                    println!("{}", summary.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Cmd::Check { config } => match parse_config(&config).and_then(|cfg| check(&cfg)) {
            Ok(report) => {
                println!(
                    "OK xi={} hbar_eff={} spectral_bound={} hermitian={}",
                    fmt_f64(report.xi),
                    fmt_f64(report.hbar_eff),
                    fmt_f64(report.spectral_bound),
                    report.hermitian
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Cmd::Dispersion {
            energy,
            v0,
            beta,
            m,
            hbar,
        } => match dispersion_solve(energy, v0, beta, m, hbar) {
            Ok(roots) => {
                println!("E,k_root");
                for k in roots {
                    println!("{},{}", fmt_f64(energy), fmt_f64(k));
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
    }
}
