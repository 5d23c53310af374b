//! Seeded experiment execution and artifact emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::{error, info, warn};
use rayon::prelude::*;
use serde::Serialize;
use statrs::statistics::Statistics;

use crate::error::{Error, Result};
use crate::oracles::InexactOracle;
use crate::problem::CompositeProblem;
use crate::problems::{build_instance, build_oracle, reference_solution, ReferenceSolution};
use crate::rng::{hash_words, StreamKey};
use crate::solver::{estimate_phi_upper, run_ziproxsg, RunRecord, SolverConfig, StepMode};
use crate::stationarity::{certify, Certificate, CertifyParams, InnerSettings};

use super::config::{ExperimentConfig, PhiUpper};

/// Candidates and Monte Carlo samples of the automatic `Φ` estimate.
const PHI_CANDIDATES: usize = 64;
const PHI_SAMPLES: usize = 256;

/// Command-line overrides of [`run_experiment`].
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Concurrent sweep entries; `None` uses every core.
    pub jobs: Option<usize>,
}

/// Contents of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub mu: f64,
    pub delta_bound: f64,
    pub t_star: usize,
    pub env_grad_norm_at_tstar: Option<f64>,
    pub wallclock_sec: f64,
    pub oracle_calls: u64,
    pub solver_oracle_calls: u64,
    pub certification_oracle_calls: u64,
    pub problem: String,
    pub oracle: String,
    pub step_mode: String,
    pub alpha_0: f64,
    pub phi_upper: f64,
    pub x_star: Vec<f64>,
    pub complete: bool,
}

/// One finished (or failed) sweep entry.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub seed: u64,
    pub horizon: usize,
    pub dir: PathBuf,
    pub summary: Option<RunSummary>,
    pub error: Option<String>,
}

/// Per-`T` statistics over seeds, written to `aggregate.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateGroup {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub certified: usize,
    pub mean_env_grad_norm: Option<f64>,
    pub std_env_grad_norm: Option<f64>,
    pub mean_sq_env_grad_norm: Option<f64>,
    pub mean_wallclock_sec: f64,
    pub mean_oracle_calls: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub runs: usize,
    pub failed: usize,
    pub phi_upper: f64,
    pub groups: Vec<AggregateGroup>,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub runs: Vec<RunReport>,
    pub aggregate: Option<Aggregate>,
}

impl ExperimentReport {
    pub fn failed(&self) -> usize {
        self.runs.iter().filter(|r| r.error.is_some()).count()
    }

    /// Process exit status: 0 when every run succeeded.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed() > 0)
    }
}

/// Solver settings of one sweep entry.
pub fn solver_config(config: &ExperimentConfig, seed: u64, horizon: usize, phi_upper: f64) -> SolverConfig<f64> {
    let s = &config.solver;
    let mut pinned = config.certify.cadence.indices(horizon);
    if !config.certify.enabled {
        pinned.clear();
    }
    SolverConfig {
        mu: s.mu,
        horizon,
        step_mode: s.step_mode.clone(),
        phi_upper,
        c_const: s.c_const,
        rho_bar_factor: s.rho_bar_factor,
        seed,
        x0: s.x0.clone(),
        iterate_cap: s.iterate_cap,
        pinned,
    }
}

/// Certification parameters for the point at iteration `t` of run `seed`.
pub fn certify_params(config: &ExperimentConfig, seed: u64, t: u64) -> CertifyParams<f64> {
    let c = &config.certify;
    CertifyParams {
        lambda: c.lambda,
        rho: c.rho,
        c_const: config.solver.c_const,
        inner: InnerSettings {
            iters: c.iters,
            batch: c.batch,
            step: c.step,
        },
        seed: hash_words(c.seed, [seed, t]),
    }
}

fn setup(config: &ExperimentConfig) -> Result<(CompositeProblem<f64>, InexactOracle<f64>)> {
    let instance = build_instance::<f64>(&config.problem)?;
    let oracle = build_oracle(&instance, &config.oracle)?;
    Ok((instance.problem, oracle))
}

/// Resolves `Φ`, estimating it once per experiment when set to `auto`.
pub fn resolve_phi_upper(config: &ExperimentConfig) -> Result<f64> {
    match config.solver.phi_upper {
        PhiUpper::Value(v) => Ok(v),
        PhiUpper::Auto => {
            let (problem, oracle) = setup(config)?;
            let phi = estimate_phi_upper(
                &problem,
                &oracle,
                &config.solver.x0,
                config.solver.mu,
                PHI_CANDIDATES,
                PHI_SAMPLES,
                StreamKey::root(config.problem.data_seed).child("phi"),
            )?;
            info!("estimated phi_upper = {phi} ({} oracle calls)", oracle.calls());
            Ok(phi)
        }
    }
}

/// Certifies an arbitrary point with the config's certification settings.
pub fn certify_point(config: &ExperimentConfig, x: &[f64]) -> Result<Certificate<f64>> {
    let (problem, oracle) = setup(config)?;
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            got: x.len(),
        });
    }
    if !problem.r.contains(x) {
        return Err(Error::Input("point is outside dom r".into()));
    }
    certify(
        &problem,
        &oracle,
        x,
        config.solver.mu,
        config.certify.epsilon,
        &certify_params(config, config.solver.seed, 0),
    )
}

/// Grid/SAA reference solution of the configured problem.
pub fn reference(config: &ExperimentConfig, resolution: f64) -> Result<ReferenceSolution> {
    reference_solution(&config.problem, resolution, config.reference_scenarios)
}

/// A finished solver run with its certificates keyed by iteration.
pub struct RunArtifacts {
    pub record: RunRecord<f64>,
    pub certificates: BTreeMap<usize, Certificate<f64>>,
    pub summary: RunSummary,
}

/// Failure of one sweep entry, keeping whatever trajectory was produced.
pub struct RunFailure {
    pub error: Error,
    pub partial: Option<Box<RunRecord<f64>>>,
}

impl From<Error> for RunFailure {
    fn from(error: Error) -> Self {
        RunFailure { error, partial: None }
    }
}

/// Runs the solver for one `(seed, T)` and certifies the cadence iterates.
pub fn execute_run(
    config: &ExperimentConfig,
    seed: u64,
    horizon: usize,
    phi_upper: f64,
) -> std::result::Result<RunArtifacts, RunFailure> {
    let (problem, oracle) = setup(config)?;
    let solver_cfg = solver_config(config, seed, horizon, phi_upper);
    let record = match run_ziproxsg(&problem, &oracle, &solver_cfg) {
        Ok(r) => r,
        Err(e) => {
            let partial = e.partial().cloned().map(Box::new);
            let error = match e {
                crate::solver::SolverError::Setup(err) => err,
                crate::solver::SolverError::Aborted { at, error, .. } => {
                    Error::Input(format!("run aborted at t = {at}: {error}"))
                }
            };
            return Err(RunFailure { error, partial });
        }
    };
    let solver_calls = oracle.calls();
    let mut certificates = BTreeMap::new();
    if config.certify.enabled {
        let mut points = config.certify.cadence.indices(horizon);
        points.push(record.t_star);
        points.sort_unstable();
        points.dedup();
        for t in points {
            let x = record
                .iterate(t)
                .ok_or_else(|| Error::Input(format!("iterate {t} was not kept")))?;
            let cert = certify(
                &problem,
                &oracle,
                x,
                config.solver.mu,
                config.certify.epsilon,
                &certify_params(config, seed, t as u64),
            )
            .map_err(|error| RunFailure {
                error,
                partial: Some(Box::new(record.clone())),
            })?;
            certificates.insert(t, cert);
        }
    }
    let total_calls = oracle.calls();
    let summary = RunSummary {
        seed,
        horizon,
        mu: config.solver.mu,
        delta_bound: oracle.delta_bound(),
        t_star: record.t_star,
        env_grad_norm_at_tstar: certificates.get(&record.t_star).map(|c| c.env_grad_norm),
        wallclock_sec: record.wallclock_sec,
        oracle_calls: total_calls,
        solver_oracle_calls: solver_calls,
        certification_oracle_calls: total_calls - solver_calls,
        problem: config.problem.name.to_string(),
        oracle: oracle.label().to_string(),
        step_mode: config.solver.step_mode.name().to_string(),
        alpha_0: record.step_sizes.first().copied().unwrap_or(f64::NAN),
        phi_upper,
        x_star: record.x_star.clone(),
        complete: record.complete,
    };
    Ok(RunArtifacts {
        record,
        certificates,
        summary,
    })
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Trajectory CSV; the `env_grad_norm` column appears only when `certified`
/// is `Some`, and is filled on the certified rows.
pub fn trajectory_csv(record: &RunRecord<f64>, certified: Option<&BTreeMap<usize, f64>>) -> String {
    let mut s = String::from("t,alpha,grad_est_norm,plus_val,minus_val,x_norm");
    if certified.is_some() {
        s.push_str(",env_grad_norm");
    }
    s.push('\n');
    for (t, tr) in record.trace.iter().enumerate() {
        let _ = write!(
            s,
            "{t},{},{},{},{},{}",
            fmt_num(tr.alpha),
            fmt_num(tr.grad_est_norm),
            fmt_num(tr.plus_val),
            fmt_num(tr.minus_val),
            fmt_num(tr.x_norm)
        );
        if let Some(c) = certified {
            s.push(',');
            if let Some(&v) = c.get(&t) {
                s.push_str(&fmt_num(v));
            }
        }
        s.push('\n');
    }
    s
}

/// Writes `trajectory.csv` and, when given, `summary.json` into `dir`.
pub fn emit_records(
    record: &RunRecord<f64>,
    certificates: Option<&BTreeMap<usize, Certificate<f64>>>,
    summary: Option<&RunSummary>,
    dir: &Path,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let norms: Option<BTreeMap<usize, f64>> =
        certificates.map(|c| c.iter().map(|(&t, cert)| (t, cert.env_grad_norm)).collect());
    fs::write(dir.join("trajectory.csv"), trajectory_csv(record, norms.as_ref()))?;
    if let Some(s) = summary {
        fs::write(dir.join("summary.json"), to_json(s)?)?;
    }
    Ok(())
}

fn to_json<S: Serialize>(v: &S) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Input(format!("json serialization failed: {e}")))
}

fn run_dir(root: &Path, seed: u64, horizon: usize, single: bool) -> PathBuf {
    if single {
        root.to_path_buf()
    } else {
        root.join(format!("seed{seed}_T{horizon}"))
    }
}

fn run_one(config: &ExperimentConfig, seed: u64, horizon: usize, phi: f64, dir: PathBuf) -> RunReport {
    let _ = fs::remove_file(dir.join("FAILED"));
    let outcome = execute_run(config, seed, horizon, phi);
    let (summary, err) = match outcome {
        Ok(art) => {
            let certs = config.certify.enabled.then_some(&art.certificates);
            match emit_records(&art.record, certs, Some(&art.summary), &dir) {
                Ok(()) => (Some(art.summary), None),
                Err(e) => (None, Some(e.to_string())),
            }
        }
        Err(f) => {
            if let Some(p) = &f.partial {
                if let Err(e) = emit_records(p, None, None, &dir) {
                    warn!("could not write partial trajectory for seed {seed}: {e}");
                }
            }
            (None, Some(f.error.to_string()))
        }
    };
    if let Some(e) = &err {
        error!("run seed={seed} T={horizon} failed: {e}");
        let _ = fs::create_dir_all(&dir);
        let _ = fs::write(dir.join("FAILED"), format!("{e}\n"));
    } else {
        info!("run seed={seed} T={horizon} done -> {}", dir.display());
    }
    RunReport {
        seed,
        horizon,
        dir,
        summary,
        error: err,
    }
}

/// Aggregates certified norms per `T` over the successful runs.
pub fn aggregate(runs: &[RunReport], phi_upper: f64) -> Aggregate {
    let mut by_t: BTreeMap<usize, Vec<&RunSummary>> = BTreeMap::new();
    for r in runs {
        if let Some(s) = &r.summary {
            by_t.entry(r.horizon).or_default().push(s);
        }
    }
    let groups = by_t
        .into_iter()
        .map(|(horizon, ss)| {
            let norms: Vec<f64> = ss.iter().filter_map(|s| s.env_grad_norm_at_tstar).collect();
            let stat = |v: Option<f64>| v.filter(|x| x.is_finite());
            let (mean, std, mean_sq) = if norms.is_empty() {
                (None, None, None)
            } else {
                let sq: Vec<f64> = norms.iter().map(|v| v * v).collect();
                let std = if norms.len() > 1 {
                    Some(norms.iter().std_dev())
                } else {
                    Some(0.0)
                };
                (stat(Some(norms.iter().mean())), stat(std), stat(Some(sq.iter().mean())))
            };
            AggregateGroup {
                horizon,
                seeds: ss.iter().map(|s| s.seed).collect(),
                certified: norms.len(),
                mean_env_grad_norm: mean,
                std_env_grad_norm: std,
                mean_sq_env_grad_norm: mean_sq,
                mean_wallclock_sec: ss.iter().map(|s| s.wallclock_sec).mean(),
                mean_oracle_calls: ss.iter().map(|s| s.oracle_calls as f64).mean(),
            }
        })
        .collect();
    Aggregate {
        runs: runs.len(),
        failed: runs.iter().filter(|r| r.error.is_some()).count(),
        phi_upper,
        groups,
    }
}

/// Runs every `(seed, T)` of the sweep, writing per-run artifacts and, for
/// more than one run, `aggregate.json`.
pub fn run_experiment(config: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentReport> {
    let mut config = config.clone();
    if let Some(seed) = opts.seed {
        config.solver.seed = seed;
        config.sweep.seeds = vec![seed];
    }
    if let Some(out) = &opts.out {
        config.output_dir = out.clone();
    }
    if matches!(config.solver.step_mode, StepMode::Custom(_)) && config.sweep.t_values.len() > 1 {
        return Err(Error::Config("custom steps need a single T".into()));
    }
    let runs = config.runs();
    let single = runs.len() == 1;
    let root = config.output_dir.clone();
    fs::create_dir_all(&root)?;
    let phi = resolve_phi_upper(&config)?;
    info!(
        "{} run(s) of {} into {}",
        runs.len(),
        config.problem.name,
        root.display()
    );

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    let reports: Vec<RunReport> = pool.install(|| {
        runs.par_iter()
            .map(|&(seed, horizon)| run_one(&config, seed, horizon, phi, run_dir(&root, seed, horizon, single)))
            .collect()
    });

    let aggregate = (!single).then(|| aggregate(&reports, phi));
    if let Some(a) = &aggregate {
        fs::write(root.join("aggregate.json"), to_json(a)?)?;
    }
    Ok(ExperimentReport {
        runs: reports,
        aggregate,
    })
}
