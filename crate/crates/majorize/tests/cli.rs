use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_majorize"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn states(dir: &Path) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    write(dir, "bell.json", &format!(r#"{{"schmidt": [[{h},0,0],[{h},1,1]]}}"#));
    write(dir, "skew.json", r#"{"schmidt": [[0.8,0,0],[0.6,1,1]]}"#);
    write(dir, "prod.json", r#"{"schmidt": [[1.0,0,0]], "dims": [2,2]}"#);
}

#[test]
fn convert_then_simulate_reaches_target_on_every_branch() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // Source with Schmidt rank 3 and a target it majorizes.
    write(d, "src.json", r#"{"vector": [0.6,0,0, 0,0.6,0, 0,0,0.5291502622129182], "dims": [3,3]}"#);
    write(d, "tgt.json", r#"{"schmidt": [[0.9,0,0],[0.3,1,1],[0.31622776601683794,2,2]]}"#);
    let o = run(d, &["convert", "src.json", "tgt.json", "--protocol", "p.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(d, &["--format", "json", "simulate", "src.json", "p.json", "--target", "tgt.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let branches = v["branches"].as_array().unwrap();
    assert!(!branches.is_empty());
    let total: f64 = branches.iter().map(|b| b["probability"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-10);
    for b in branches {
        assert!(b["fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
    }
}

#[test]
fn convert_reports_failure_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    states(dir.path());
    let o = run(dir.path(), &["convert", "skew.json", "bell.json", "--protocol", "p.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not convertible"));
    assert!(!dir.path().join("p.json").exists());
}

#[test]
fn majorize_text_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.json", "[0.7, 0.2, 0.1]");
    write(dir.path(), "b.json", "[0.4, 0.35, 0.25]");
    let o = run(dir.path(), &["majorize", "a.json", "b.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "a ≻ b");
    let o = run(dir.path(), &["majorize", "b.json", "a.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "a ≻ b");

    // Smaller total: only the weak relation can hold.
    write(dir.path(), "c.json", "[0.3, 0.2]");
    assert_eq!(run(dir.path(), &["majorize", "a.json", "c.json"]).status.code(), Some(1));
    let o = run(dir.path(), &["majorize", "--weak", "a.json", "c.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "a ≻_w c");
}

#[test]
fn powers_csv_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["powers", "--lambda", "0.3", "--n", "1..6"]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["n", "fidelity", "beta"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    let f: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    for w in f.windows(2) {
        assert!(w[1] >= w[0] - 1e-12, "{f:?}");
    }
    // beta is computed for small n only, and never exceeds Tsirelson's bound.
    for r in &rows {
        let n: usize = r[0].parse().unwrap();
        if n <= 4 {
            let b: f64 = r[2].parse().unwrap();
            assert!(b > 2.0 && b <= 2.0 * 2f64.sqrt() + 1e-9);
        } else {
            assert!(r[2].is_empty());
        }
    }
}

#[test]
fn powers_config_file() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "cfg.json", r#"{"lambda": 1.0, "n_list": [1, 3], "targets": ["bell"], "restarts": 2}"#);
    let o = run(dir.path(), &["--format", "json", "powers", "--config", "cfg.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let res = v["results"].as_array().unwrap();
    assert_eq!(res.len(), 2);
    // Uniform catalysts cannot help: the value stays at 1/sqrt(2).
    for r in res {
        assert!((r["fidelity"].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }
}

#[test]
fn synthesized_map_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "f.json", "[0.5, 0.3, 0.2]");
    write(dir.path(), "g.json", "[0.4, 0.3, 0.3]");
    let o = run(dir.path(), &["synth-ds", "f.json", "g.json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let v: Value = serde_json::from_str(&text).unwrap();
    let map = majorize::json::stochastic_map(&v, "").unwrap();
    let back = majorize::json::to_string(&majorize::json::stochastic_map_json(&map));
    assert_eq!(back, text);
    assert!(map.is_ds(1e-12));
}

#[test]
fn synth_refuses_when_not_majorized() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "f.json", "[0.4, 0.3, 0.3]");
    write(dir.path(), "g.json", "[0.5, 0.3, 0.2]");
    assert_eq!(run(dir.path(), &["synth-ds", "f.json", "g.json"]).status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    states(dir.path());
    let args = ["--seed", "7", "bell", "skew.json", "--restarts", "3"];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let a = run(dir.path(), &["powers", "--n", "1..3"]);
    let b = run(dir.path(), &["powers", "--n", "1..3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_input_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.json", r#"{"schmidt": [[0.8, 0, 0], [0.6, 1, -1]]}"#);
    let o = run(dir.path(), &["monotones", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("schmidt[1][2]"), "{err}");

    write(dir.path(), "nan.json", r#"{"values": [0.5, "x"]}"#);
    let o = run(dir.path(), &["lorenz", "nan.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("values[1]"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    states(dir.path());
    assert_eq!(run(dir.path(), &["--tol", "-1", "lorenz", "bell.json"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(run(dir.path(), &["lorenz", "missing.json"]).status.code(), Some(2));
}

#[test]
fn slocc_and_monotones() {
    let dir = tempfile::tempdir().unwrap();
    states(dir.path());
    let o = run(dir.path(), &["slocc", "prod.json", "bell.json"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(dir.path(), &["--format", "json", "slocc", "prod.json", "bell.json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["fidelity_squared"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let o = run(dir.path(), &["--format", "csv", "monotones", "bell.json", "--alpha", "0,1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    for r in rdr.records() {
        let s: f64 = r.unwrap()[1].parse().unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-12);
    }
}

#[test]
fn lorenz_csv() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "w.json", r#"{"values": [1.0, 3.0], "masses": [0.5, 0.25]}"#);
    let o = run(dir.path(), &["--format", "csv", "lorenz", "w.json"]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let pts: Vec<(f64, f64)> =
        rdr.records().map(|r| r.unwrap()).map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap())).collect();
    assert_eq!(pts.len(), 3);
    assert!((pts[1].0 - 0.25).abs() < 1e-15 && (pts[1].1 - 0.75).abs() < 1e-15);
    assert!((pts[2].0 - 0.75).abs() < 1e-15 && (pts[2].1 - 1.25).abs() < 1e-15);
}
