use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-ops")).args(args).output().unwrap()
}

fn run_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-ops"))
        .args(args)
        .env("DIRAC_OPS_THREADS", threads)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dirac-ops-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn beam_row(csv: &str, family: &str) -> Vec<f64> {
    let line = csv.lines().find(|l| l.starts_with(&format!("{family},"))).unwrap();
    line.split(',').skip(1).map(|x| x.parse().unwrap()).collect()
}

#[test]
fn table1_is_deterministic_across_thread_counts() {
    let args = ["table1", "--samples", "12", "--seed", "3"];
    let one = run_with_threads(&args, "1");
    let four = run_with_threads(&args, "4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let v: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["seed"], 3);
}

#[test]
fn massless_table1_skips_rest_frame_rows() {
    let o = run(&["table1", "--samples", "6", "--mass", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let skipped = v["closed_forms"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["report"]["skipped"] == "rest-frame construction")
        .count();
    assert_eq!(skipped, 4);
}

#[test]
fn beam_reports_the_three_families() {
    let o = run(&["beam"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert_eq!(csv.lines().next(), Some("family,Sz,Lz,Jz,Delta"));
    let p = beam_row(&csv, "projected");
    let n = beam_row(&csv, "NWFW");
    assert!((p[0] - 0.4375).abs() < 1e-9 && (p[1] - 1.0625).abs() < 1e-9);
    assert!((n[0] - 0.5).abs() < 1e-9 && (n[1] - 1.0).abs() < 1e-9);
}

#[test]
fn flags_override_config_which_overrides_defaults() {
    let cfg = scratch("beam.json", r#"{"ell": 2, "theta0": 0.3}"#);
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout(&run(&["beam", "--config", cfg]));
    assert!((beam_row(&from_file, "NWFW")[2] - 2.5).abs() < 1e-12);
    let flagged = stdout(&run(&["beam", "--config", cfg, "--ell", "3"]));
    let nw = beam_row(&flagged, "NWFW");
    assert!((nw[2] - 3.5).abs() < 1e-12);
    assert!((nw[3] - 0.5 * 0.3f64.sin().powi(2)).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_with_two() {
    let bad = scratch("bad.json", r#"{"bogus": 1}"#);
    assert_eq!(run(&["beam", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["nope"]).status.code(), Some(2));
    assert_eq!(run(&["beam", "--theta0", "2.0"]).status.code(), Some(2));
    assert_eq!(run(&["pauli", "--ratio", "0.9"]).status.code(), Some(2));
    assert_eq!(run_with_threads(&["table1", "--samples", "2"], "zero").status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn zitter_pure_state_is_flat() {
    let o = run(&["zitter", "--mix", "pure", "--steps", "64"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert_eq!(csv.lines().next(), Some("t,x,y,z,Rx,Ry,Rz"));
    assert_eq!(csv.lines().count(), 65);
}

#[test]
fn pauli_writes_a_passing_report() {
    let out = scratch("pauli.json", "");
    let o = run(&["pauli", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["soi"].as_array().unwrap().len(), 2);
    assert!(v["r_squared"]["observed_order"].as_f64().unwrap() >= 1.8);
}

#[test]
fn moment_matches_ell_plus_twice_spin() {
    let o = run(&["moment", "--n-phi", "256", "--n-radial", "256"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "polarized");
    let e_moment: f64 = row[4].parse().unwrap();
    assert!((e_moment - 2.0).abs() < 0.02);
}

#[test]
fn hall_energy_centroid_carries_twice_the_shift() {
    let o = run(&["hall", "--n-phi", "128", "--n-radial", "32"]);
    let csv = stdout(&o);
    assert_eq!(csv.lines().next(), Some("centroid,shift_x,shift_y,predicted_x,predicted_y,relative_error"));
    let energy: Vec<f64> = csv.lines().find(|l| l.starts_with("energy,")).unwrap().split(',').skip(1).map(|x| x.parse().unwrap()).collect();
    assert!((energy[1] - 0.075).abs() < 0.02 * 0.075, "{energy:?}");
    assert!(energy[4] < 0.02);
}
