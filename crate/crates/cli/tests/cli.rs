use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn zop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zop")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.cfg");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn list_problems_names_every_instance() {
    let out = zop(&["list-problems"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "norm_sharp",
        "l1_minus_l2",
        "cusp_box",
        "max_affine",
        "two_stage_qp",
        "mm_instant",
        "mm_ergodic",
    ] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "# smoke\nproblem.name = norm_sharp\nproblem.n = 5\nsolver.T = 100\nsolver.seed = 1\n",
    );
    let out_dir = dir.path().join("out");
    let out = zop(&[
        "run",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
        "--jobs",
        "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("trajectory.csv").exists());
    assert!(out_dir.join("summary.json").exists());
}

#[test]
fn invalid_config_lists_every_bad_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "problem.name = cusp_box\nproblem.n = 2\nsolver.mu = -0.1\nsolver.x0 = 5, 0\n",
    );
    let out = zop(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("solver.mu"), "{err}");
    assert!(err.contains("solver.x0"), "{err}");
}

#[test]
fn failed_run_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "problem.name = two_stage_qp\nproblem.n = 2\noracle.tol = 1e-14\noracle.budget = 1\nsolver.T = 5\n",
    );
    let out_dir = dir.path().join("out");
    let out = zop(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out_dir.join("FAILED").exists());
}

#[test]
fn certify_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "problem.name = norm_sharp\nproblem.n = 2\nsolver.mu = 0.01\ncertify.lambda = 1\ncertify.rho = 0\ncertify.iters = 200\ncertify.batch = 8\n",
    );
    let out = zop(&["certify", "--config", &cfg, "--point", "-3,0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let norm = v["env_grad_norm"].as_f64().unwrap();
    assert!((norm - 1.0).abs() < 0.05, "{norm}");
    assert_eq!(v["pass"], false);
}

#[test]
fn reference_solves_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "problem.name = cusp_box\nproblem.n = 1\n");
    let out = zop(&["reference", "--config", &cfg, "--resolution", "0.01"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["phi_ref"].as_f64().unwrap().abs() < 1e-12);
    assert!(v["x_ref"][0].as_f64().unwrap() >= 1.0 - 1e-12);
}
