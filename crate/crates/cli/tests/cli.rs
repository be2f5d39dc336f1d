use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use idsig::presets::balanced;
use idsig::{believes, Population};
use idsig_cli::config::PopulationConfig;
use idsig_cli::report::parse_strategy;
use serde_json::{json, Value};
use tempfile::TempDir;

fn reference_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/balanced.json")
}

fn idsig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idsig")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn write_config(dir: &TempDir, name: &str, population: &Population, extra: Value) -> PathBuf {
    let mut doc = json!({ "population": PopulationConfig::from(population) });
    if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
        d.extend(e);
    }
    let path = dir.path().join(name);
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    path
}

fn with_profiles(a: [f64; 4], b: [f64; 4]) -> Population {
    Population::new(
        idsig::IdentityProfile::new(a[0], a[1], a[2], a[3]).unwrap(),
        idsig::IdentityProfile::new(b[0], b[1], b[2], b[3]).unwrap(),
    )
}

#[test]
fn equilibrium_on_reference_config() {
    let cfg = reference_config();
    let out = idsig(&["equilibrium", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = stdout_json(&out);
    assert_eq!(r["case"], "k_A>k_B>1");
    assert_eq!(r["Q"], json!(3.9756097561));
    assert_eq!(r["k_A"], json!(2.85714285714));
    assert_eq!(r["m_A"], json!(1.0));
    assert_eq!(r["believes_B"], json!(true));
    // deterministic output
    assert_eq!(out.stdout, idsig(&["equilibrium", "--config", cfg.to_str().unwrap()]).stdout);
}

#[test]
fn equilibrium_of_pure_accuracy_seekers_is_truthful() {
    let dir = TempDir::new().unwrap();
    let pop = with_profiles([0.7, 0.0, 1.0, 2.0], [0.4, 0.0, 1.0, 3.0]);
    let cfg = write_config(&dir, "acc.json", &pop, json!({}));
    let out = idsig(&["equilibrium", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["Q"], json!(4.0));
}

#[test]
fn equilibrium_rejects_unrestricted_population() {
    let dir = TempDir::new().unwrap();
    let pop = with_profiles([0.55, 0.45, 3.0, 2.0], [0.55, 0.45, 1.0, 3.5]);
    let cfg = write_config(&dir, "bad.json", &pop, json!({}));
    let out = idsig(&["equilibrium", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("type A"));
}

#[test]
fn config_problems_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&idsig(&["equilibrium"])), 64);
    let missing = dir.path().join("none.json");
    assert_eq!(code(&idsig(&["equilibrium", "--config", missing.to_str().unwrap()])), 64);
    let cfg = write_config(&dir, "extra.json", &balanced(), json!({ "colour": "blue" }));
    assert_eq!(code(&idsig(&["equilibrium", "--config", cfg.to_str().unwrap()])), 64);
    let cfg = write_config(&dir, "plain.json", &balanced(), json!({}));
    for cmd in ["estimate", "sweep", "simulate"] {
        let out = idsig(&[cmd, "--config", cfg.to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()]);
        assert_eq!(code(&out), 64, "{cmd}");
    }
}

#[test]
fn verify_exit_codes() {
    let cfg = reference_config();
    let out = idsig(&["verify", "--config", cfg.to_str().unwrap(), "--trials", "1"]);
    assert_eq!(code(&out), 0);
    let r = stdout_json(&out);
    assert!(r["max_quality_gap"].as_f64().unwrap() <= 1e-9);
    assert_eq!(code(&idsig(&["verify", "--trials", "0"])), 64);
    let out = idsig(&["verify", "--trials", "500", "--seed", "11"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["trials"], 500);
}

#[test]
fn estimate_reference_values() {
    let cfg = reference_config();
    let out = idsig(&["estimate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = stdout_json(&out);
    assert_eq!(r["steps_A"], 21);
    assert_eq!(r["steps_B"], 21);
    assert_eq!(format!("{:.3}", r["k_hat_A"].as_f64().unwrap()), "2.855");
    assert_eq!(format!("{:.3}", r["k_hat_B"].as_f64().unwrap()), "1.024");
    assert_eq!(r["at_upper_bound_A"], json!(false));
    // reported strategy reproduces the reported believe flags
    let s = parse_strategy(&r["strategy"]).unwrap();
    let (a, b) = believes(&s, &balanced());
    assert_eq!((r["believes_A"].as_bool(), r["believes_B"].as_bool()), (Some(a), Some(b)));
    assert_eq!((a, b), (true, true));
}

#[test]
fn estimate_flags_upper_bound_and_bad_resolution() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "coarse.json", &balanced(), json!({ "estimator": { "delta": 0.5, "M": 2 } }));
    let out = idsig(&["estimate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["at_upper_bound_A"], json!(true));
    for delta in [0.0, -1.0] {
        let cfg = write_config(&dir, "bad.json", &balanced(), json!({ "estimator": { "delta": delta } }));
        assert_eq!(code(&idsig(&["estimate", "--config", cfg.to_str().unwrap()])), 2);
    }
}

#[test]
fn sweep_writes_full_grid() {
    let dir = TempDir::new().unwrap();
    let cfg = reference_config();
    let csv = dir.path().join("grid.csv");
    let out = idsig(&["sweep", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap(), "--audit"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    assert_eq!(summary["rows"], 10201);
    assert_eq!(summary["violations"], 0);

    let text = fs::read_to_string(&csv).unwrap();
    let mut reader = csv_rows(&text);
    assert_eq!(reader.next().unwrap(), "axis1,axis2,k_A,k_B,case,n_A,n_B,Q");
    let rows: Vec<_> = reader.collect();
    assert_eq!(rows.len(), 10201);
    for row in &rows {
        let q: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((2.0..=4.0).contains(&q), "{row}");
    }
    let again = dir.path().join("again.csv");
    idsig(&["sweep", "--config", cfg.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(fs::read(&csv).unwrap(), fs::read(&again).unwrap());
}

fn csv_rows(text: &str) -> impl Iterator<Item = &str> {
    assert!(!text.contains('\r'));
    text.lines()
}

#[test]
fn sweep_rejections_and_audit_failure() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("g.csv");
    let axis = |param: &str, lo: f64, hi: f64, resolution: u32| {
        let axis = json!({ "param": param, "lo": lo, "hi": hi, "resolution": resolution });
        json!({ "sweep": { "axes": [axis] } })
    };

    let cfg = write_config(&dir, "r1.json", &balanced(), axis("lambda_s_A", 0.0, 1.0, 1));
    assert_eq!(code(&idsig(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()])), 64);

    let cfg = write_config(&dir, "ok.json", &balanced(), axis("lambda_s_A", 0.0, 1.0, 11));
    assert_eq!(code(&idsig(&["sweep", "--config", cfg.to_str().unwrap()])), 64);
    let unwritable = dir.path().join("missing/dir/g.csv");
    assert_eq!(code(&idsig(&["sweep", "--config", cfg.to_str().unwrap(), "--out", unwritable.to_str().unwrap()])), 2);

    // raising delta_O_B pushes k_B up and quality down
    let cfg = write_config(&dir, "do.json", &balanced(), axis("delta_O_B", 1.0, 5.0, 41));
    let args = ["sweep", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()];
    assert_eq!(code(&idsig(&args)), 0);
    let with_audit: Vec<&str> = args.iter().copied().chain(["--audit"]).collect();
    let out = idsig(&with_audit);
    assert_eq!(code(&out), 1);
    assert!(stdout_json(&out)["violations"].as_u64().unwrap() > 0);
}

#[test]
fn simulate_matches_quality() {
    let dir = TempDir::new().unwrap();
    let cfg = reference_config();
    let csv = dir.path().join("mc.csv");
    let out = idsig(&["simulate", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = stdout_json(&out);
    assert_eq!(r["N"], 1_000_000);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["within_3_sigma"], json!(true));
    assert!(fs::read_to_string(&csv).unwrap().starts_with("N,seed,accuracy,std_error,expected\n1000000,7,"));

    let seeded = idsig(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "99"]);
    assert_eq!(stdout_json(&seeded)["seed"], 99);
    assert_eq!(seeded.stdout, idsig(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "99"]).stdout);
}
