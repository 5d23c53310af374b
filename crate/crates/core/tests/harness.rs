//! End-to-end runs of the experiment harness.

use std::fs;
use std::path::Path;

use zop_core::harness::{execute_run, parse_config, run_experiment, ExperimentConfig, RunOptions};

fn config(text: &str) -> ExperimentConfig {
    parse_config(text).unwrap()
}

fn opts(dir: &Path) -> RunOptions {
    RunOptions {
        out: Some(dir.to_path_buf()),
        jobs: Some(2),
        seed: None,
    }
}

fn csv_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn single_run_without_certification() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("problem.name = norm_sharp\nproblem.n = 5\nsolver.T = 1000\nsolver.seed = 1\n");
    let report = run_experiment(&cfg, &opts(dir.path())).unwrap();
    assert_eq!(report.exit_code(), 0);
    assert!(report.aggregate.is_none());
    let rows = csv_rows(&dir.path().join("trajectory.csv"));
    assert_eq!(rows[0], "t,alpha,grad_est_norm,plus_val,minus_val,x_norm");
    assert_eq!(rows.len(), 1002);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    for key in [
        "seed",
        "T",
        "mu",
        "delta_bound",
        "t_star",
        "env_grad_norm_at_tstar",
        "wallclock_sec",
        "oracle_calls",
    ] {
        assert!(summary.get(key).is_some(), "missing {key}");
    }
    assert_eq!(summary["oracle_calls"], 2002);
    assert!(summary["env_grad_norm_at_tstar"].is_null());
    assert!(!dir.path().join("aggregate.json").exists());
}

#[test]
fn zero_horizon_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("problem.name = norm_sharp\nproblem.n = 2\nsolver.T = 0\n");
    run_experiment(&cfg, &opts(dir.path())).unwrap();
    let rows = csv_rows(&dir.path().join("trajectory.csv"));
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("0,"));
}

#[test]
fn numbers_round_trip_with_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("problem.name = l1_minus_l2\nproblem.n = 3\nsolver.T = 20\nsolver.x0 = 0.3, 0.2, 0.1\n");
    let art = execute_run(&cfg, 0, 20, 1.0).ok().unwrap();
    run_experiment(&cfg, &opts(dir.path())).unwrap();
    let rows = csv_rows(&dir.path().join("trajectory.csv"));
    for (row, tr) in rows[1..].iter().zip(&art.record.trace) {
        let cols: Vec<f64> = row.split(',').skip(1).map(|c| c.parse().unwrap()).collect();
        assert_eq!(
            cols,
            vec![tr.alpha, tr.grad_est_norm, tr.plus_val, tr.minus_val, tr.x_norm]
        );
    }
}

#[test]
fn oracle_calls_reconcile_with_certification() {
    let cfg = config(
        "problem.name = l1_minus_l2\nproblem.n = 3\nsolver.T = 40\nsolver.x0 = 0.3, 0.2, 0.1\ncertify.enabled = true\ncertify.iters = 20\ncertify.batch = 4\n",
    );
    let art = execute_run(&cfg, 3, 40, 1.0).ok().unwrap();
    let cert_calls: u64 = art.certificates.values().map(|c| c.oracle_calls).sum();
    assert_eq!(art.summary.solver_oracle_calls, 2 * 41);
    assert_eq!(art.summary.certification_oracle_calls, cert_calls);
    assert_eq!(art.summary.oracle_calls, 2 * 41 + cert_calls);
    let mut expected: Vec<usize> = vec![0, 10, 20, 30, 40, art.record.t_star];
    expected.sort_unstable();
    expected.dedup();
    assert_eq!(art.certificates.keys().copied().collect::<Vec<_>>(), expected);
    assert_eq!(
        art.summary.env_grad_norm_at_tstar,
        Some(art.certificates[&art.record.t_star].env_grad_norm)
    );
}

#[test]
fn certified_rows_carry_the_norm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        "problem.name = cusp_box\nproblem.n = 2\nsolver.T = 8\nsolver.x0 = 0.5, 0.5\ncertify.enabled = true\ncertify.iters = 10\ncertify.batch = 4\ncertify.cadence = 2, 5\n",
    );
    let report = run_experiment(&cfg, &opts(dir.path())).unwrap();
    let t_star = report.runs[0].summary.as_ref().unwrap().t_star;
    let rows = csv_rows(&dir.path().join("trajectory.csv"));
    assert!(rows[0].ends_with(",env_grad_norm"));
    for (t, row) in rows[1..].iter().enumerate() {
        let filled = !row.ends_with(',');
        assert_eq!(filled, t == 2 || t == 5 || t == t_star, "row {t}: {row}");
    }
}

#[test]
fn seed_sweep_writes_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        "problem.name = l1_minus_l2\nproblem.n = 2\nsolver.T = 50\nsolver.x0 = 0.5, 0.4\ncertify.enabled = true\ncertify.cadence = tstar\ncertify.iters = 20\ncertify.batch = 4\nsweep.seeds = 0, 1, 2, 3, 4\nsweep.T_values = 50, 100\n",
    );
    let report = run_experiment(&cfg, &opts(dir.path())).unwrap();
    assert_eq!(report.exit_code(), 0);
    assert_eq!(report.runs.len(), 10);
    for s in 0..5 {
        for t in [50, 100] {
            let sub = dir.path().join(format!("seed{s}_T{t}"));
            assert!(sub.join("trajectory.csv").exists());
            assert!(sub.join("summary.json").exists());
        }
    }
    let agg: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("aggregate.json")).unwrap()).unwrap();
    assert_eq!(agg["runs"], 10);
    let groups = agg["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 2);
    for g in groups {
        assert_eq!(g["certified"], 5);
        assert!(g["mean_env_grad_norm"].as_f64().unwrap() >= 0.0);
        assert!(g["std_env_grad_norm"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn seed_override_runs_one_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("problem.name = norm_sharp\nproblem.n = 2\nsolver.T = 10\nsweep.seeds = 1, 2, 3\n");
    let report = run_experiment(
        &cfg,
        &RunOptions {
            seed: Some(9),
            ..opts(dir.path())
        },
    )
    .unwrap();
    assert_eq!(report.runs.len(), 1);
    assert_eq!(report.runs[0].seed, 9);
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn failed_run_leaves_marker_and_partial_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg =
        config("problem.name = two_stage_qp\nproblem.n = 2\noracle.tol = 1e-14\noracle.budget = 1\nsolver.T = 20\n");
    let report = run_experiment(&cfg, &opts(dir.path())).unwrap();
    assert_eq!(report.exit_code(), 1);
    assert!(dir.path().join("FAILED").exists());
    assert!(dir.path().join("trajectory.csv").exists());
    assert!(!dir.path().join("summary.json").exists());
    assert!(fs::read_to_string(dir.path().join("FAILED"))
        .unwrap()
        .contains("budget"));
}

#[test]
fn automatic_phi_is_positive_and_shared() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        "problem.name = cusp_box\nproblem.n = 2\nsolver.x0 = -1.0, 0.0\nsolver.phi_upper = auto\nsolver.T = 10\nsweep.seeds = 0, 1\n",
    );
    let report = run_experiment(&cfg, &opts(dir.path())).unwrap();
    let phis: Vec<f64> = report
        .runs
        .iter()
        .map(|r| r.summary.as_ref().unwrap().phi_upper)
        .collect();
    assert!(phis[0] > 0.0);
    assert_eq!(phis[0], phis[1]);
}
