//! Experiment plumbing: config parsing, seeded sweeps, certification and
//! CSV/JSON artifacts.

pub mod config;
pub mod run;

pub use config::{
    parse_config, Cadence, CertifySettings, ConfigErrors, ExperimentConfig, PhiUpper, SolverSettings, Sweep,
};
pub use run::{
    aggregate, certify_params, certify_point, emit_records, execute_run, reference, resolve_phi_upper, run_experiment,
    solver_config, trajectory_csv, Aggregate, AggregateGroup, ExperimentReport, RunArtifacts, RunFailure, RunOptions,
    RunReport, RunSummary,
};
