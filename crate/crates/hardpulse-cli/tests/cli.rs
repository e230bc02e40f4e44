use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardpulse"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Rows of `profile.csv` as `(z, [mx, my, mz])`.
fn profile(dir: &Path) -> Vec<(f64, [f64; 3])> {
    std::fs::read_to_string(dir.join("profile.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], [v[1], v[2], v[3]])
        })
        .collect()
}

fn at_centre(rows: &[(f64, [f64; 3])]) -> [f64; 3] {
    rows.iter().min_by(|a, b| a.0.abs().total_cmp(&b.0.abs())).unwrap().1
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn zero_reflection_gives_empty_pulse() {
    let tmp = TempDir::new().unwrap();
    let out = run(&configs().join("invert-zero.toml"), tmp.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let pulse = std::fs::read_to_string(tmp.path().join("pulse.csv")).unwrap();
    assert_eq!(pulse, "t,re_omega,im_omega\n0,0,0\n");
    let rows = profile(tmp.path());
    assert_eq!(rows.len(), 4096);
    assert!(rows.iter().all(|(_, m)| *m == [0.0, 0.0, 1.0]));
    let d = json(&tmp.path().join("diagnostics.json"));
    assert_eq!(d["impulses"], 0);
}

#[test]
fn roundtrip_is_accurate_and_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let cfg = configs().join("roundtrip.toml");
    assert!(run(&cfg, a.path(), &[]).status.success());
    assert!(run(&cfg, b.path(), &[]).status.success());
    let d = json(&a.path().join("diagnostics.json"));
    assert!(d["round_trip_error"].as_f64().unwrap() < 1e-6, "{d}");
    assert_eq!(d["seed"], 7);
    for f in ["pulse.json", "pulse.csv", "profile.csv", "diagnostics.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let c = TempDir::new().unwrap();
    assert!(run(&cfg, c.path(), &["--seed", "8"]).status.success());
    assert_ne!(std::fs::read(a.path().join("pulse.json")).unwrap(), std::fs::read(c.path().join("pulse.json")).unwrap());
}

#[test]
fn small_equiripple_design() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "job.json",
        r#"{"command": "design", "method": "equiripple", "delta": 0.1, "grid": 1024,
            "parameters": {"rho": 20, "tau": 0.3, "band": [-0.3, 0.3], "delta2": 0.02}}"#,
    );
    let out_dir = tmp.path().join("out");
    let out = run(&cfg, &out_dir, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("design equiripple:"));
    let d = json(&out_dir.join("diagnostics.json"));
    assert!(d["unitarity_defect"].as_f64().unwrap() < 1e-9);
    assert!(d["round_trip_error"].as_f64().unwrap() < 1e-6, "{d}");
    let p = json(&out_dir.join("pulse.json"));
    assert!(p["start"].as_i64().unwrap() + (p["omegas"].as_array().unwrap().len() as i64) <= 20);
    let m = at_centre(&profile(&out_dir));
    assert!(m[2].abs() < 0.05, "{m:?}");
}

#[test]
fn bad_grid_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().join("out");
    std::fs::create_dir(&out_dir).unwrap();
    let out = run(&configs().join("roundtrip.toml"), &out_dir, &["--grid", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    let body: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(body["error"], "ConfigError");
    assert_eq!(body["exit_code"], 2);
    assert_eq!(json(&out_dir.join("error.json")), body);
    assert!(!out_dir.join("pulse.json").exists());
}

#[test]
fn missing_parameters_are_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "job.toml", "command = \"design\"\nmethod = \"equiripple\"\n");
    let out = run(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(2));
    let body: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(body["message"].as_str().unwrap().contains("parameters"), "{body}");
}

#[test]
fn infeasible_half_pulse_is_a_numerical_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "job.toml",
        "command = \"design\"\nmethod = \"halfpulse\"\ngrid = 256\n[parameters]\npeak = 1.2\nwidth = 0.2\n",
    );
    let out = run(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let body: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(body["exit_code"], 3);
    assert_ne!(body["error"], "ConfigError");
}

#[test]
fn quiet_run_prints_nothing() {
    let tmp = TempDir::new().unwrap();
    let out = run(&configs().join("halfpulse.toml"), tmp.path(), &["--quiet"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let d = json(&tmp.path().join("diagnostics.json"));
    assert!(d["mx_error"].as_f64().unwrap() < 1e-6, "{d}");
}

#[test]
fn sinc_pulse_tips_the_centre() {
    let tmp = TempDir::new().unwrap();
    assert!(run(&configs().join("sinc90-simulate.toml"), tmp.path(), &[]).status.success());
    let rows = profile(tmp.path());
    let m = at_centre(&rows);
    assert!(m[2].abs() < 0.05, "{m:?}");
    let edge = rows.iter().max_by(|a, b| a.0.abs().total_cmp(&b.0.abs())).unwrap().1;
    assert!(edge[2] > 0.9, "{edge:?}");
}

#[test]
fn dist_and_slr_slices_agree_in_band() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert!(run(&configs().join("flip120-dist.toml"), a.path(), &[]).status.success());
    assert!(run(&configs().join("flip120-slr.toml"), b.path(), &[]).status.success());
    let (pa, pb) = (profile(a.path()), profile(b.path()));
    for rows in [&pa, &pb] {
        let mz = at_centre(rows)[2];
        assert!((mz + 0.5).abs() < 0.02, "{mz}");
    }
    for ((za, ma), (zb, mb)) in pa.iter().zip(&pb) {
        assert_eq!(za, zb);
        if za.abs() < 0.15 {
            assert!((ma[2] - mb[2]).abs() < 0.03, "z {za}: {} vs {}", ma[2], mb[2]);
        }
    }
}
