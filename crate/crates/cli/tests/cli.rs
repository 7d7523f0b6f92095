use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_darwinism");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("RUST_LOG", "off").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scenario(dir: &Path, region: &str) -> String {
    let p = dir.join("scenario.cfg");
    std::fs::write(&p, format!("radius_m = 1e-6\npermittivity = 4\ndx_m = 1e-6\ntemperature_K = 300\nregion = {region}\n")).unwrap();
    p.to_str().unwrap().to_string()
}

/// Parses a single-table CSV into (header, rows).
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.is_empty());
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(text: &str, name: &str) -> Vec<String> {
    let (header, rows) = csv(text);
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.into_iter().map(|r| r[i].clone()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn rate_ratios() {
    let dir = tempfile::tempdir().unwrap();
    for (region, expected) in [("isotropic", 1.0), ("disk:90:0", 0.5), ("disk:60:0", 0.353125)] {
        let cfg = scenario(dir.path(), region);
        let out = stdout(&run(&["rate", "--config", &cfg]));
        let ratio = num(&column(&out, "ratio")[0]);
        assert!((ratio - expected).abs() < 1e-10, "{region}: {ratio}");
    }
}

#[test]
fn alpha_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    for (region, expected) in [("isotropic", 0.0), ("disk:90:0", 0.886719)] {
        let cfg = scenario(dir.path(), region);
        let out = stdout(&run(&["alpha", "--config", &cfg]));
        assert!((num(&column(&out, "alpha")[0]) - expected).abs() < 1e-6, "{region}");
        assert!(num(&column(&out, "closed_form_gap")[0]) < 1e-6);
    }
    // A point source without irradiance still has α = 1; SI columns go blank.
    let cfg = scenario(dir.path(), "point:30");
    let out = stdout(&run(&["alpha", "--config", &cfg]));
    assert_eq!(num(&column(&out, "alpha")[0]), 1.0);
    assert_eq!(column(&out, "tau_r_inv_s")[0], "");
}

#[test]
fn pip_spot_value() {
    let out = stdout(&run(&["pip", "--times", "10", "--alpha", "1", "--f-count", "6"]));
    assert!(out.contains("\n0.2,0.624009104696\n"), "{out}");
}

#[test]
fn pip_blocks_per_slice() {
    let out = stdout(&run(&["pip", "--times", "1,10", "--alpha", "1,0.5", "--f-count", "3"]));
    assert_eq!(out.matches("f,mi_nats").count(), 4);
}

#[test]
fn redundancy_blank_until_defined() {
    let out = stdout(&run(&["redundancy", "--start", "0.5", "--stop", "50", "--count", "12"]));
    let exact = column(&out, "R_exact");
    let first = exact.iter().position(|s| !s.is_empty()).expect("R defined somewhere");
    assert!(first > 0);
    assert!(exact[first..].iter().all(|s| num(s) >= 1.0));
    // The lower bound is blank where t ≤ ln(2/δ).
    let t = column(&out, "t_over_tauD");
    let lower = column(&out, "R_lower");
    for (t, l) in t.iter().zip(&lower) {
        assert_eq!(l.is_empty(), num(t) <= (2.0f64 / 0.01).ln(), "t = {t}");
    }
}

#[test]
fn redundancy_alpha_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "isotropic");
    let out = stdout(&run(&["redundancy", "--config", &cfg, "--start", "10", "--stop", "20", "--count", "2"]));
    assert!(out.contains("# alpha = 0\n"));
    assert!(column(&out, "R_estimate").iter().all(|s| num(s) == 0.0));
}

#[test]
fn sweep_grid_order_and_json() {
    let out = stdout(&run(&["sweep", "--axis", "theta0", "--start", "0", "--stop", "180", "--count", "7", "--jobs", "3", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let thetas: Vec<f64> = rows.iter().map(|r| r["theta0_deg"].as_f64().unwrap()).collect();
    assert_eq!(thetas, vec![0.0, 30.0, 60.0, 90.0, 120.0, 150.0, 180.0]);
    assert!((rows[3]["rate_ratio"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    for r in rows {
        let gap = r["alpha"].as_f64().unwrap() - r["alpha_quadrature"].as_f64().unwrap();
        assert!(gap.abs() < 1e-6);
    }
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let args = ["sweep", "--axis", "M", "--start", "2", "--stop", "1e4", "--count", "9", "--spacing", "log"];
    let one = stdout(&run(&[&args[..], &["--jobs", "1"]].concat()));
    let four = stdout(&run(&[&args[..], &["--jobs", "4"]].concat()));
    assert_eq!(one, four);
}

#[test]
fn oracle_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = run(&["oracle", "--seed", "11", "--format", "json", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["config"]["seed"], 11);
}

#[test]
fn config_errors_exit_2_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.cfg");
    let o = run(&["rate", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "radius_m = 1e-6\npermittivity = 4\ndx_m = 1e-6\ntemperature_K = -3\nregion = isotropic\n").unwrap();
    let o = run(&["rate", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("temperature_K"));

    let o = run(&["redundancy", "--delta", "0.9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta"));

    let o = run(&["sweep", "--axis", "theta0", "--start", "0", "--stop", "200", "--count", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("theta0"));
}

#[test]
fn resource_cap_exits_3() {
    let o = run(&["oracle", "--cap", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}
