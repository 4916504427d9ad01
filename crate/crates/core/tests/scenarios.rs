mod common;

use common::scenarios_dir;
use nonloc::scenario::{parse_config, parse_config_str, run_scenario, RunOptions};
use serde_json::Value;

fn compare(path: &str, got: &Value, want: &Value, worst: &mut f64) {
    match (got, want) {
        (Value::Object(a), Value::Object(b)) => {
            let (ka, kb): (Vec<_>, Vec<_>) = (a.keys().collect(), b.keys().collect());
            assert_eq!(ka, kb, "keys differ at {path}");
            for (k, v) in b {
                compare(&format!("{path}.{k}"), &a[k], v, worst);
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            assert_eq!(a.len(), b.len(), "length differs at {path}");
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                compare(&format!("{path}[{i}]"), x, y, worst);
            }
        }
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            let gap = (a - b).abs() / b.abs().max(1.0);
            *worst = worst.max(gap);
            assert!(gap <= 1e-9, "{path}: {a} vs golden {b}");
        }
        _ => assert_eq!(got, want, "value differs at {path}"),
    }
}

fn check_golden(name: &str) {
    let cfg = parse_config(&scenarios_dir().join(format!("{name}.toml"))).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        out_dir: Some(dir.path().to_path_buf()),
        ..Default::default()
    };
    let run = run_scenario(&cfg, &opts).unwrap();
    let golden: Value =
        serde_json::from_str(&std::fs::read_to_string(scenarios_dir().join(format!("goldens/{name}.summary.json"))).unwrap())
            .unwrap();
    let mut worst = 0.0;
    compare("", &run.summary_json, &golden, &mut worst);
    assert!(run.meta.exists());
}

#[test]
fn free_1d_matches_golden() {
    check_golden("free-1d");
}

#[test]
fn frahn_lemmer_1d_matches_golden() {
    check_golden("frahn-lemmer-1d");
}

#[test]
fn absorber_1d_matches_golden() {
    check_golden("absorber-1d");
}

#[test]
fn nc_full_2d_matches_golden() {
    check_golden("nc-full-2d");
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = parse_config(&scenarios_dir().join("absorber-1d.toml")).unwrap();
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let opts = RunOptions {
                out_dir: Some(dir.path().to_path_buf()),
                ..Default::default()
            };
            std::fs::read(run_scenario(&cfg, &opts).unwrap().summary).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn field_dumps_are_written_on_request() {
    let cfg = parse_config(&scenarios_dir().join("free-1d.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        out_dir: Some(dir.path().to_path_buf()),
        dump_fields: Some(true),
        sample_every: Some(500),
    };
    run_scenario(&cfg, &opts).unwrap();
    for f in ["psi_00000.csv", "psi_00500.csv", "psi_01000.csv", "residual_01000.csv", "jtot0_01000.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn config_errors_are_collected() {
    let text = "[grid]\ndim = 4\npoints = 16\nextent = -1.0\nbogus = 1\n[dynamics]\ndt = -0.1\n";
    let err = parse_config_str(text, &scenarios_dir()).unwrap_err();
    assert!(err.is_config_error());
    let msg = err.to_string();
    assert!(msg.contains("bogus") && msg.contains("dt"), "{msg}");
}

#[test]
fn syntax_errors_carry_a_position() {
    let err = parse_config_str("[grid]\ndim = = 2\n", &scenarios_dir()).unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
}
