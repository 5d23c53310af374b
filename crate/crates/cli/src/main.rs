use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use zop_core::harness::{self, parse_config, ExperimentConfig, RunOptions};
use zop_core::problems::ProblemName;

#[derive(Parser, Debug)]
#[command(
    name = "zop",
    version,
    about = "Zeroth-order proximal stochastic gradient experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the solver over the configured seed/T sweep.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Run a single seed instead of the configured sweep seeds.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sweep entries run concurrently.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Certify a point and print the certificate as JSON.
    Certify {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// List the built-in problem instances.
    ListProblems,
    /// Grid/SAA reference solution of a small instance.
    Reference {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        resolution: f64,
    },
}

fn load(path: &Path) -> Result<ExperimentConfig, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("invalid config {}:\n{e}", path.display()))
}

fn parse_point(s: &str) -> Result<Vec<f64>, String> {
    zop_core::harness::config::parse_list::<f64>(s)
        .filter(|v| !v.is_empty())
        .ok_or_else(|| format!("--point: expected comma-separated numbers, got '{s}'"))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            jobs,
        } => {
            let cfg = load(&config)?;
            let report = harness::run_experiment(&cfg, &RunOptions { seed, out, jobs }).map_err(|e| e.to_string())?;
            for r in &report.runs {
                match (&r.summary, &r.error) {
                    (Some(s), _) => println!(
                        "seed={} T={} t*={} env_grad_norm={} calls={} -> {}",
                        s.seed,
                        s.horizon,
                        s.t_star,
                        s.env_grad_norm_at_tstar
                            .map_or_else(|| "-".to_string(), |v| format!("{v:.6e}")),
                        s.oracle_calls,
                        r.dir.display()
                    ),
                    (None, Some(e)) => println!("seed={} T={} FAILED: {e}", r.seed, r.horizon),
                    (None, None) => {}
                }
            }
            Ok(ExitCode::from(report.exit_code() as u8))
        }
        Command::Certify { config, point } => {
            let cfg = load(&config)?;
            let x = parse_point(&point)?;
            let cert = harness::certify_point(&cfg, &x).map_err(|e| e.to_string())?;
            let json = serde_json::json!({
                "x": cert.x,
                "x_hat": cert.x_hat,
                "lambda": cert.lambda,
                "mu": cert.mu,
                "rho": cert.rho,
                "epsilon": cert.epsilon,
                "env_grad_norm": cert.env_grad_norm,
                "pass": cert.pass,
                "inner_iters": cert.inner_iters,
                "inner_residual": cert.inner_residual,
                "mc_samples": cert.mc_samples,
                "oracle_calls": cert.oracle_calls,
                "goldstein_radius_smoothed": cert.goldstein_radius_smoothed,
                "goldstein_radius_original": cert.goldstein_radius_original,
                "oracle_error_term": cert.oracle_error_term,
            });
            println!("{}", serde_json::to_string_pretty(&json).map_err(|e| e.to_string())?);
            eprintln!("{}", cert.summary());
            Ok(ExitCode::SUCCESS)
        }
        Command::ListProblems => {
            for p in ProblemName::ALL {
                println!("{:<14} {}", p.as_str(), p.description());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Reference { config, resolution } => {
            let cfg = load(&config)?;
            let r = harness::reference(&cfg, resolution).map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&r).map_err(|e| e.to_string())?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ZOP_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
