use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn harmlab(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmlab"))
        .args(args)
        .env("HARMLAB_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn eps_column(rows: &[Vec<String>]) -> Vec<(u64, u64)> {
    rows.iter().map(|r| (r[4].parse().unwrap(), r[5].parse().unwrap())).collect()
}

#[test]
fn lists_presets() {
    let dir = TempDir::new().unwrap();
    let out = harmlab(&["presets"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 11);
    for name in ["z1-control", "f2-floor", "lemma2-suite", "grigorchuk-probe"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn z1_control_writes_exact_reciprocals() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let st = harmlab(&["run", "z1-control", "--out", out.to_str().unwrap()], dir.path());
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let rows = csv_rows(&out.join("z1-control/epsilon_z1.csv"));
    let expected: Vec<(u64, u64)> = (2..=9).map(|d| (1, d)).collect();
    assert_eq!(eps_column(&rows), expected);
}

#[test]
fn f2_floor_starts_at_nine_quarters_and_decreases() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let st = harmlab(&["run", "f2-floor", "--out", out.to_str().unwrap()], dir.path());
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let eps = eps_column(&csv_rows(&out.join("f2-floor/epsilon_free2.csv")));
    assert_eq!(eps[0], (9, 4));
    let vals: Vec<f64> = eps.iter().map(|&(n, d)| n as f64 / d as f64).collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0]));
    assert!(vals.iter().all(|&v| v >= 0.5));
}

#[test]
fn empty_radius_range_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = harmlab(
        &["epsilon-scan", "--group", "z:1", "--radius-min", "5", "--radius-max", "2", "--out", dir.path().to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_preset_and_bad_group_are_input_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(harmlab(&["run", "no-such-preset"], dir.path()).status.code(), Some(2));
    let out = harmlab(&["ball", "--group", "z:0", "--out", dir.path().to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(harmlab(&["bogus"], dir.path()).status.code(), Some(2));
}

#[test]
fn size_cap_stops_with_partial_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let st = harmlab(
        &["epsilon-scan", "--group", "z:2", "--radius-max", "40", "--size-cap", "50", "--out", out.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(st.status.code(), Some(3));
    assert!(fs::read_to_string(out.join("epsilon_z2.partial")).unwrap().contains("size cap"));
    let kept: Vec<String> = csv_rows(&out.join("epsilon_z2.csv")).iter().map(|r| r[3].clone()).collect();
    assert_eq!(kept, ["1", "2", "3"]);
}

#[test]
fn config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("scan.json");
    fs::write(
        &cfg,
        format!(
            r#"{{"experiment": "epsilon-scan", "group": "z:1", "radius_min": 1, "radius_max": 3, "mode": "exact", "out": "{}"}}"#,
            out.display()
        ),
    )
    .unwrap();
    let st = harmlab(&["epsilon-scan", "--config", cfg.to_str().unwrap(), "--radius-max", "5"], dir.path());
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let eps = eps_column(&csv_rows(&out.join("epsilon_z1.csv")));
    assert_eq!(eps, vec![(1, 2), (1, 3), (1, 4), (1, 5), (1, 6)]);
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"group": "z:1", "radius": 3}"#).unwrap();
    let st = harmlab(&["epsilon-scan", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}"));
        let st = harmlab(
            &["simulate", "--group", "free:2", "--radius-max", "2", "--samples", "20000", "--seed", "7", "--out", out.to_str().unwrap()],
            dir.path(),
        );
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
        outputs.push(fs::read(out.join("simulate_free2_r2.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn cache_directory_receives_balls() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache");
    let out = dir.path().join("out");
    for _ in 0..2 {
        let st = harmlab(&["exit", "--group", "lamplighter", "--radius-max", "2", "--out", out.to_str().unwrap()], &cache);
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    }
    let balls = fs::read_dir(&cache).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "ball")).count();
    assert_eq!(balls, 1);
}

#[test]
fn step_probabilities_change_the_walk() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let st = harmlab(
        &["epsilon-scan", "--group", "z:1", "--probs", "2/3,1/3", "--radius-min", "1", "--radius-max", "1", "--mode", "exact", "--out", out.to_str().unwrap()],
        dir.path(),
    );
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    // Exit to 2 from 0 is 4/7 and from 1 is 6/7; to -2 they are 3/7 and 1/7.
    assert_eq!(eps_column(&csv_rows(&out.join("epsilon_z1.csv"))), vec![(2, 3)]);
}

#[test]
fn certify_and_grigorchuk_probe_succeed() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    for args in [
        vec!["certify", "--group", "z:1", "--delta", "1/4", "--r0", "4", "--radius-max", "8"],
        vec!["probe-grigorchuk", "--radius-max", "5"],
        vec!["telescope", "--group", "z:2", "--radius-max", "3"],
        vec!["lemma2", "--group", "free:2", "--instances", "20", "--radius-max", "3"],
    ] {
        let mut full = args.clone();
        full.extend(["--out", out.to_str().unwrap()]);
        let st = harmlab(&full, dir.path());
        assert!(st.status.success(), "{args:?}: {}", String::from_utf8_lossy(&st.stderr));
    }
    assert!(out.join("certificate_z1.json").exists());
    assert!(out.join("probe_grigorchuk.csv").exists());
}
