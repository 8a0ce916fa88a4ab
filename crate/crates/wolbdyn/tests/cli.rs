//! End-to-end checks of the `wolbdyn` binary: exit-code contract, output
//! schemas, determinism, and the scenario behaviours the commands document.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wolbdyn"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

const LOW_COST_CONFIG: &str = r#"{
    "model": "single",
    "parameters": {"xi": 0.9, "tau": 1.0, "q": 1.0}
}"#;

#[test]
fn analyze_reports_the_three_equilibria() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "cfg.json", LOW_COST_CONFIG);
    let out = run(&["analyze", "--config", &cfg, "--out", "."], tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&read(tmp.path(), "report.json")).unwrap();
    assert_eq!(report["model"], "single");
    assert_eq!(report["region"], "C");
    let eq = report["equilibria"].as_array().unwrap();
    assert_eq!(eq.len(), 4); // disease-free, origin, two interior roots
    let points: Vec<(f64, f64)> = eq
        .iter()
        .map(|e| {
            let p = e["point"].as_array().unwrap();
            (p[0].as_f64().unwrap(), p[1].as_f64().unwrap())
        })
        .collect();
    for expect in [(0.0, 1.0), (0.09, 0.81), (0.9, 0.0)] {
        assert!(
            points
                .iter()
                .any(|p| (p.0 - expect.0).abs() < 1e-9 && (p.1 - expect.1).abs() < 1e-9),
            "missing equilibrium {expect:?} in {points:?}"
        );
    }
    let classes: Vec<&str> = eq
        .iter()
        .map(|e| e["classification"].as_str().unwrap())
        .collect();
    assert!(classes.contains(&"saddle"));
    assert!(classes.contains(&"stable_node_or_focus"));
}

#[test]
fn analyze_age_model_reports_nonexistent_disease_free() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{
            "model": "age_structured",
            "parameters": {"max_age": 1.0, "cells": 200, "tau": 0.9, "q": 1.0,
                           "beta1": 3.0, "beta2": 0.5, "eta1": 1.0, "eta2": 1.0}
        }"#,
    );
    let out = run(&["analyze", "--config", &cfg, "--out", "."], tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&read(tmp.path(), "report.json")).unwrap();
    assert_eq!(report["disease_free"]["status"], "nonexistent");
}

#[test]
fn malformed_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{"model": "single", "parameters": {"xi": 0.9, "tau": 1.0, "q": 1.0}, "unknown_key": 1}"#,
    );
    let out = run(&["analyze", "--config", &cfg], tmp.path());
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // a missing config path is also a config error
    let out = run(&["analyze"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_double_infection_scenario() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{
            "model": "multistrain",
            "parameters": {"tau_a": 0.9, "tau_b": 0.9, "eta_a": 1.1, "eta_b": 1.1,
                           "q0_a": 0.9, "q0_b": 0.9, "qa_b": 0.9, "qa_ab": 0.9,
                           "qb_a": 0.9, "qb_ab": 0.9, "product_escape": true},
            "initial_state": [0.1, 0.1, 0.1, 0.1],
            "run": {"t_end": 2000.0, "conv_tol": 1e-10}
        }"#,
    );
    let out = run(&["simulate", "--config", &cfg, "--out", "."], tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(tmp.path(), "timeseries.csv");
    assert!(
        csv.ends_with("# terminal: converged\n"),
        "tail: {}",
        &csv[csv.len() - 40..]
    );
    let last_row = csv
        .lines()
        .rfind(|l| !l.starts_with('#') && l.contains(','))
        .unwrap();
    let vals: Vec<f64> = last_row.split(',').map(|v| v.parse().unwrap()).collect();
    // columns: t, i_ab, i_a, i_b, u; the doubly infected class dominates
    assert!(vals[1] > vals[2] && vals[1] > vals[3], "row {vals:?}");
}

#[test]
fn simulate_mutually_incompatible_reaches_marginal_state() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{
            "model": "mutually_incompatible",
            "parameters": {"tau": 1.0, "eta": 1.1, "q0": 1.0, "qa_b": 0.99, "qb_a": 1.0},
            "initial_state": [0.0, 0.3, 0.2, 0.4],
            "run": {"t_end": 2000.0, "conv_tol": 1e-10}
        }"#,
    );
    let out = run(&["simulate", "--config", &cfg, "--out", "."], tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(tmp.path(), "timeseries.csv");
    let last_row = csv
        .lines()
        .rfind(|l| !l.starts_with('#') && l.contains(','))
        .unwrap();
    let vals: Vec<f64> = last_row.split(',').map(|v| v.parse().unwrap()).collect();
    // one strain dies out; the survivor carries the whole population
    let (i_a, i_b) = (vals[2], vals[3]);
    assert!(i_a.min(i_b) < 1e-6, "no marginal convergence: {vals:?}");
    assert!(i_a.max(i_b) > 0.5, "survivor too small: {vals:?}");
}

#[test]
fn simulate_zero_initial_state_is_constant_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{
            "model": "single",
            "parameters": {"xi": 0.9, "tau": 1.0, "q": 1.0},
            "initial_state": [0.0, 0.0],
            "run": {"t_end": 10.0}
        }"#,
    );
    let out = run(&["simulate", "--config", &cfg, "--out", "."], tmp.path());
    assert!(out.status.success());
    let csv = read(tmp.path(), "timeseries.csv");
    let mut rows = 0;
    for line in csv
        .lines()
        .filter(|l| l.starts_with(|c: char| c.is_ascii_digit()))
    {
        let vals: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(vals[1], 0.0);
        assert_eq!(vals[2], 0.0);
        rows += 1;
    }
    // the origin is an equilibrium, so the run converges on the spot and the
    // series is the constant zero state
    assert!(rows >= 1);
    assert!(csv.ends_with("# terminal: converged\n"));
}

#[test]
fn sweep_single_points_and_threshold() {
    let tmp = tempfile::tempdir().unwrap();
    // single point (0.9, 1, 1) -> C
    let cfg = write(
        tmp.path(),
        "point.json",
        r#"{
            "model": "single",
            "parameters": {"xi": 0.9, "tau": 1.0, "q": 1.0},
            "sweep": {"xi": {"min": 0.9, "max": 0.9, "count": 1},
                      "tau": {"min": 1.0, "max": 1.0, "count": 1},
                      "q": {"min": 1.0, "max": 1.0, "count": 1}},
            "outputs": {"table": "point.csv"}
        }"#,
    );
    let out = run(&["sweep", "--config", &cfg, "--out", "."], tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(tmp.path(), "point.csv");
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2); // header + one row
    assert!(rows[1].ends_with(",C"), "row: {}", rows[1]);

    // single point (1, 0.5, 1) -> A
    let cfg = write(
        tmp.path(),
        "point_a.json",
        r#"{
            "model": "single",
            "parameters": {"xi": 1.0, "tau": 0.5, "q": 1.0},
            "sweep": {"xi": {"min": 1.0, "max": 1.0, "count": 1},
                      "tau": {"min": 0.5, "max": 0.5, "count": 1},
                      "q": {"min": 1.0, "max": 1.0, "count": 1}},
            "outputs": {"table": "point_a.csv"}
        }"#,
    );
    assert!(run(&["sweep", "--config", &cfg, "--out", "."], tmp.path())
        .status
        .success());
    let csv = read(tmp.path(), "point_a.csv");
    assert!(csv.lines().nth(2).unwrap().ends_with(",A"));

    // 50^3 grid: smallest tau carrying region C is 0.75 within one grid step
    let cfg = write(
        tmp.path(),
        "grid.json",
        r#"{
            "model": "single",
            "parameters": {"xi": 0.9, "tau": 1.0, "q": 1.0},
            "sweep": {"xi": {"min": 0.02, "max": 1.0, "count": 50},
                      "tau": {"min": 0.0, "max": 1.0, "count": 50},
                      "q": {"min": 0.0, "max": 1.0, "count": 50}},
            "outputs": {"table": "grid.csv"}
        }"#,
    );
    assert!(run(&["sweep", "--config", &cfg, "--out", "."], tmp.path())
        .status
        .success());
    let csv = read(tmp.path(), "grid.csv");
    let mut min_tau_c = f64::INFINITY;
    for line in csv.lines().skip(2) {
        let mut parts = line.split(',');
        let _xi = parts.next().unwrap();
        let tau: f64 = parts.next().unwrap().parse().unwrap();
        let _q = parts.next().unwrap();
        if parts.next() == Some("C") {
            min_tau_c = min_tau_c.min(tau);
        }
    }
    let grid_step = 1.0 / 49.0;
    assert!(
        (min_tau_c - 0.75).abs() <= grid_step + 1e-12,
        "min tau in region C: {min_tau_c}"
    );
}

#[test]
fn sweep_is_deterministic_and_thread_independent() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_text = r#"{
        "model": "single",
        "parameters": {"xi": 0.9, "tau": 1.0, "q": 1.0},
        "sweep": {"xi": {"min": 0.1, "max": 1.0, "count": 12},
                  "tau": {"min": 0.0, "max": 1.0, "count": 13},
                  "q": {"min": 0.0, "max": 1.0, "count": 14},
                  "include_equilibrium": true},
        "outputs": {"table": "OUT.csv"}
    }"#;
    let cfg1 = write(tmp.path(), "one.json", &cfg_text.replace("OUT", "one"));
    let cfg2 = write(tmp.path(), "two.json", &cfg_text.replace("OUT", "two"));
    assert!(run(
        &["sweep", "--config", &cfg1, "--out", ".", "--threads", "1"],
        tmp.path()
    )
    .status
    .success());
    assert!(run(
        &["sweep", "--config", &cfg2, "--out", ".", "--threads", "5"],
        tmp.path()
    )
    .status
    .success());
    assert_eq!(read(tmp.path(), "one.csv"), read(tmp.path(), "two.csv"));

    // env fallback must behave the same
    let cfg3 = write(tmp.path(), "three.json", &cfg_text.replace("OUT", "three"));
    let out = Command::new(env!("CARGO_BIN_EXE_wolbdyn"))
        .args(["sweep", "--config", &cfg3, "--out", ".", "--seed", "7"])
        .env("WOLBDYN_THREADS", "3")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read(tmp.path(), "one.csv"), read(tmp.path(), "three.csv"));
}

#[test]
fn sweep_resource_guard_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "big.json",
        r#"{
            "model": "single",
            "parameters": {"xi": 0.9, "tau": 1.0, "q": 1.0},
            "sweep": {"xi": {"min": 0.01, "max": 1.0, "count": 300},
                      "tau": {"min": 0.0, "max": 1.0, "count": 300},
                      "q": {"min": 0.0, "max": 1.0, "count": 300}}
        }"#,
    );
    let out = run(&["sweep", "--config", &cfg], tmp.path());
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn simulate_step_underflow_exits_3_with_partial_output() {
    let tmp = tempfile::tempdir().unwrap();
    // tolerances below representable local error force the step size to
    // collapse under the minimum
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{
            "model": "single",
            "parameters": {"xi": 0.9, "tau": 1.0, "q": 1.0},
            "initial_state": [0.5, 0.1],
            "run": {"t_end": 10.0, "rel_tol": 1e-300, "abs_tol": 1e-300}
        }"#,
    );
    let out = run(&["simulate", "--config", &cfg, "--out", "."], tmp.path());
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(tmp.path(), "timeseries.csv");
    assert!(csv.ends_with("# terminal: stiffness\n"));
    assert!(csv.lines().any(|l| l.starts_with("0.0000000000000000e0,")));
}

#[test]
fn phasefield_grid_signs_and_separatrix() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{
            "model": "single",
            "parameters": {"xi": 0.9, "tau": 1.0, "q": 1.0},
            "window": {"i_min": 0.0, "i_max": 1.0, "u_min": 0.0, "u_max": 1.0,
                       "resolution": 40}
        }"#,
    );
    let out = run(&["phasefield", "--config", &cfg, "--out", "."], tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(tmp.path(), "phasefield.csv");
    let samples: Vec<&str> = csv.lines().filter(|l| l.starts_with("sample,")).collect();
    assert_eq!(samples.len(), 1600);
    // growth signs partition the window: near the origin the uninfected
    // class grows; beyond total population 1/eta = 0.9 the infected shrink
    for line in &samples {
        let f: Vec<&str> = line.split(',').collect();
        let (i, u): (f64, f64) = (f[1].parse().unwrap(), f[2].parse().unwrap());
        let sign_di: i32 = f[5].parse().unwrap();
        let sign_du: i32 = f[6].parse().unwrap();
        if i == 0.0 && u > 0.0 && u < 0.9 {
            assert_eq!(sign_du, 1, "u must grow on the axis below capacity: {line}");
        }
        if i > 0.0 && i + u > 0.91 {
            assert_eq!(sign_di, -1, "i must shrink above capacity: {line}");
        }
    }
    let sep_rows = csv.lines().filter(|l| l.starts_with("sep0,")).count();
    assert!(sep_rows > 100, "separatrix polyline too short: {sep_rows}");

    // resolution 1: a single sample at the window corner
    let cfg = write(
        tmp.path(),
        "corner.json",
        r#"{
            "model": "single",
            "parameters": {"xi": 1.0, "tau": 0.5, "q": 1.0},
            "window": {"i_min": 0.2, "i_max": 0.8, "u_min": 0.3, "u_max": 0.9,
                       "resolution": 1},
            "outputs": {"field": "corner.csv"}
        }"#,
    );
    assert!(
        run(&["phasefield", "--config", &cfg, "--out", "."], tmp.path())
            .status
            .success()
    );
    let csv = read(tmp.path(), "corner.csv");
    let samples: Vec<&str> = csv.lines().filter(|l| l.starts_with("sample,")).collect();
    assert_eq!(samples.len(), 1);
    assert!(samples[0].starts_with("sample,2.0000000000000001e-1,2.9999999999999999e-1"));
}

#[test]
fn phasefield_coexistence_window_has_one_saddle_polyline() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{
            "model": "single",
            "parameters": {"xi": 1.0, "tau": 0.76, "q": 1.0},
            "window": {"i_min": 0.0, "i_max": 0.8, "u_min": 0.0, "u_max": 1.0,
                       "resolution": 10}
        }"#,
    );
    assert!(
        run(&["phasefield", "--config", &cfg, "--out", "."], tmp.path())
            .status
            .success()
    );
    let csv = read(tmp.path(), "phasefield.csv");
    assert!(csv.lines().any(|l| l.starts_with("sep0,")));
    assert!(
        !csv.lines().any(|l| l.starts_with("sep1,")),
        "exactly one saddle expected"
    );
}

#[test]
fn agestruct_analyze_benchmark() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{
            "model": "age_structured",
            "parameters": {"max_age": 1.0, "cells": 800, "tau": 0.9, "q": 1.0,
                           "beta1": 5.0, "beta2": 5.0, "eta1": 1.0, "eta2": 1.0}
        }"#,
    );
    let out = run(
        &["agestruct-analyze", "--config", &cfg, "--out", "."],
        tmp.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&read(tmp.path(), "report.json")).unwrap();
    assert_eq!(report["trivial_stability"]["verdict"], "unstable");
    assert_eq!(report["disease_free"]["status"], "exists");
    // equal fertilities make the invasion integral exactly tau < 1: the
    // one-sided criterion stays silent (bistability, as in the unstructured
    // low-cost example)
    assert_eq!(
        report["disease_free"]["instability"]["verdict"],
        "inconclusive"
    );
    let witness = report["disease_free"]["instability"]["witness"]
        .as_f64()
        .unwrap();
    assert!((witness - 0.9).abs() < 1e-9, "invasion integral {witness}");
    let states = report["positive"]["states"].as_array().unwrap();
    assert_eq!(states.len(), 2);
    assert!(states[0]["k_at_zero"].as_f64().unwrap() < 0.0);
    assert_eq!(states[0]["instability"]["verdict"], "unstable");
    // profile CSVs exist with the documented columns
    let prof = read(tmp.path(), "profiles_positive_0.csv");
    assert!(prof
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("age,i_star,u_star"));
    let df = read(tmp.path(), "profiles_disease_free.csv");
    assert_eq!(df.lines().nth(1).unwrap(), "age,i_star,u_star");
}

#[test]
fn agestruct_simulate_growth_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{
            "model": "age_structured",
            "parameters": {"max_age": 1.0, "cells": 200, "tau": 0.9, "q": 1.0,
                           "beta1": 3.0, "beta2": 2.0, "eta1": 1.0, "eta2": 1.0},
            "initial_state": {"i0": 0.01, "u0": 1.0},
            "run": {"t_end": 2.0}
        }"#,
    );
    let out = run(
        &["agestruct-simulate", "--config", &cfg, "--out", "."],
        tmp.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(tmp.path(), "timeseries.csv");
    assert_eq!(csv.lines().nth(1).unwrap(), "t,I,U");
    assert!(csv.ends_with("# terminal: reached_horizon\n"));
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 401); // initial row plus 400 steps
    assert!(
        rows.last().unwrap()[1] > rows[0][1],
        "infected total must grow"
    );
}

#[test]
fn analyze_multistrain_with_seeds() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{
            "model": "multistrain",
            "parameters": {"tau_a": 0.9, "tau_b": 0.9, "eta_a": 1.1, "eta_b": 1.1,
                           "q0_a": 0.9, "q0_b": 0.9, "qa_b": 0.9, "qa_ab": 0.9,
                           "qb_a": 0.9, "qb_ab": 0.9, "product_escape": true},
            "analysis": {"seeds": [[0.5, 0.1, 0.1, 0.05]]}
        }"#,
    );
    let out = run(&["analyze", "--config", &cfg, "--out", "."], tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&read(tmp.path(), "report.json")).unwrap();
    let seed_results = report["seed_results"].as_array().unwrap();
    assert_eq!(seed_results[0]["status"], "converged");
    let pt = seed_results[0]["report"]["point"].as_array().unwrap();
    assert!((pt[0].as_f64().unwrap() - 0.49474029572914796).abs() < 1e-8);
}

#[test]
fn analyze_output_reparses_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "cfg.json", LOW_COST_CONFIG);
    assert!(run(
        &["analyze", "--config", &cfg, "--out", ".", "--seed", "123"],
        tmp.path()
    )
    .status
    .success());
    let first = read(tmp.path(), "report.json");
    assert!(
        run(&["analyze", "--config", &cfg, "--out", "."], tmp.path())
            .status
            .success()
    );
    let second = read(tmp.path(), "report.json");
    assert_eq!(first, second);
    let parsed: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert!(parsed["version"].is_string());
}

#[test]
fn fecundity_model_runs_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{
            "model": "single_fecundity",
            "parameters": {"tau": 1.0, "q": 1.0, "mu": 0.9},
            "initial_state": [0.5, 0.1],
            "run": {"t_end": 200.0, "conv_tol": 1e-10}
        }"#,
    );
    assert!(
        run(&["simulate", "--config", &cfg, "--out", "."], tmp.path())
            .status
            .success()
    );
    let out = run(&["analyze", "--config", &cfg, "--out", "."], tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&read(tmp.path(), "report.json")).unwrap();
    assert!(report["equilibria"].as_array().unwrap().len() >= 3);
    assert!(report["region"].is_null());
}
