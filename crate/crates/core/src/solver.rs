//! The Z-iProxSG loop: two oracle calls per iteration, a proximal step, and a
//! step-size-weighted random choice of the returned iterate.

use std::time::Instant;

use log::{debug, warn};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::oracles::{BiasMode, InexactOracle};
use crate::problem::{CompositeProblem, Scenario};
use crate::prox::apply_prox;
use crate::rng::StreamKey;
use crate::smoothing::{estimate_smoothed_value, sample_sphere, two_point_estimate, SmoothingParams};
use crate::Scalar;

/// Default number of dense iterates kept before striding kicks in.
pub const DEFAULT_ITERATE_CAP: usize = 100_000;

/// How the step sequence `α_0..α_T` is produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMode<T> {
    /// Constant theorem step, mean-bias oracle.
    TheoremB1,
    /// Same formula; bounded-only oracle on a compact domain.
    TheoremB2,
    Constant(T),
    /// Explicit sequence of length `T + 1`.
    Custom(Vec<T>),
}

impl<T> StepMode<T> {
    pub fn name(&self) -> &'static str {
        match self {
            StepMode::TheoremB1 => "theorem_b1",
            StepMode::TheoremB2 => "theorem_b2",
            StepMode::Constant(_) => "constant",
            StepMode::Custom(_) => "custom",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub mu: T,
    /// Last iteration index `T`; the loop runs `t = 0..=T`.
    pub horizon: usize,
    pub step_mode: StepMode<T>,
    /// `Φ`, an upper bound on the initial envelope gap.
    pub phi_upper: T,
    pub c_const: T,
    /// `ρ̄ = factor · ρ`, with factor in `(1, 2]`.
    pub rho_bar_factor: T,
    pub seed: u64,
    pub x0: Vec<T>,
    pub iterate_cap: usize,
    /// Iteration indices whose iterate is always kept.
    pub pinned: Vec<usize>,
}

impl<T: Scalar> SolverConfig<T> {
    pub fn new(x0: Vec<T>, mu: T, horizon: usize, seed: u64) -> Self {
        SolverConfig {
            mu,
            horizon,
            step_mode: StepMode::TheoremB1,
            phi_upper: T::one(),
            c_const: T::one(),
            rho_bar_factor: T::of(2.0),
            seed,
            x0,
            iterate_cap: DEFAULT_ITERATE_CAP,
            pinned: Vec::new(),
        }
    }

    pub fn smoothing(&self) -> Result<SmoothingParams<T>> {
        SmoothingParams::new(self.mu, self.c_const)
    }

    /// `ρ̄ = factor · c G √n / μ`.
    pub fn rho_bar(&self, lipschitz: T, n: usize) -> Result<T> {
        Ok(self.rho_bar_factor * self.smoothing()?.weak_convexity(lipschitz, n))
    }

    fn validate(&self, problem: &CompositeProblem<T>) -> Result<()> {
        self.smoothing()?;
        if !(self.rho_bar_factor > T::one() && self.rho_bar_factor <= T::of(2.0)) {
            return Err(Error::Config(format!(
                "rho_bar_factor must lie in (1, 2], got {}",
                self.rho_bar_factor
            )));
        }
        if !(self.phi_upper > T::zero()) || !self.phi_upper.is_finite() {
            return Err(Error::Config(format!("phi_upper must be > 0, got {}", self.phi_upper)));
        }
        if self.iterate_cap < 2 {
            return Err(Error::Config("iterate_cap must be >= 2".into()));
        }
        if !problem.validate_point(&self.x0)? {
            return Err(Error::Config("x0 is outside dom r".into()));
        }
        Ok(())
    }
}

/// `α = sqrt(Φ / (4 c G n^{3/2} μ^{-1} (32 √(2π) G² + n δ̃ / μ²) (T + 1)))`.
#[allow(clippy::too_many_arguments)]
pub fn theorem_step_size<T: Scalar>(
    phi_upper: T,
    c_const: T,
    lipschitz: T,
    n: usize,
    mu: T,
    delta_bound: T,
    horizon: usize,
) -> Result<T> {
    let positive = |v: T, name: &str| -> Result<()> {
        if v > T::zero() && v.is_finite() {
            Ok(())
        } else {
            Err(Error::Input(format!("{name} must be > 0, got {v}")))
        }
    };
    positive(phi_upper, "phi_upper")?;
    positive(c_const, "c")?;
    positive(lipschitz, "G")?;
    positive(mu, "mu")?;
    if n == 0 {
        return Err(Error::Input("dimension must be >= 1".into()));
    }
    if !(delta_bound >= T::zero()) {
        return Err(Error::Input(format!("delta bound must be >= 0, got {delta_bound}")));
    }
    let nf = T::of_usize(n);
    let k = T::of(32.0) * (T::of(2.0) * T::PI()).sqrt();
    let inner = k * lipschitz * lipschitz + nf / (mu * mu) * delta_bound;
    let denom = T::of(4.0) * c_const * lipschitz * nf * nf.sqrt() / mu * inner * T::of_usize(horizon + 1);
    Ok((phi_upper / denom).sqrt())
}

/// The full step sequence for a run, after the `α_t <= ρ̄⁻¹` check.
pub fn step_schedule<T: Scalar>(
    problem: &CompositeProblem<T>,
    oracle: &InexactOracle<T>,
    config: &SolverConfig<T>,
) -> Result<Vec<T>> {
    let n = problem.dim();
    let g = problem.lipschitz_bound();
    let cap = T::one() / config.rho_bar(g, n)?;
    let len = config.horizon + 1;
    match &config.step_mode {
        StepMode::TheoremB1 | StepMode::TheoremB2 => {
            if matches!(config.step_mode, StepMode::TheoremB1) && oracle.bias_mode() == BiasMode::B2BoundedOnly {
                warn!("theorem_b1 steps with an oracle that only guarantees bounded error");
            }
            if matches!(config.step_mode, StepMode::TheoremB2) && problem.r.diameter().is_none() {
                warn!("theorem_b2 steps on an unbounded domain");
            }
            let alpha = theorem_step_size(
                config.phi_upper,
                config.c_const,
                g,
                n,
                config.mu,
                oracle.delta_bound(),
                config.horizon,
            )?;
            let alpha = if alpha > cap {
                warn!("theorem step {alpha} exceeds 1/rho_bar = {cap}; clipping");
                cap
            } else {
                alpha
            };
            Ok(vec![alpha; len])
        }
        StepMode::Constant(a) => {
            check_steps(&[*a], cap)?;
            Ok(vec![*a; len])
        }
        StepMode::Custom(seq) => {
            if seq.len() != len {
                return Err(Error::Config(format!(
                    "custom step sequence has length {}, expected T + 1 = {len}",
                    seq.len()
                )));
            }
            check_steps(seq, cap)?;
            Ok(seq.clone())
        }
    }
}

fn check_steps<T: Scalar>(steps: &[T], cap: T) -> Result<()> {
    for (t, &a) in steps.iter().enumerate() {
        if !(a > T::zero()) || a > cap {
            return Err(Error::Config(format!(
                "step size alpha_{t} = {a} must lie in (0, 1/rho_bar] = (0, {cap}]"
            )));
        }
    }
    Ok(())
}

/// Draws `t` with probability `α_t / Σ α_i` by inverse CDF; a uniform landing
/// exactly on a cumulative boundary goes to the lower index.
pub fn select_iterate<T: Scalar, R: Rng + ?Sized>(steps: &[T], rng: &mut R) -> Result<usize> {
    if steps.is_empty() {
        return Err(Error::Input("cannot select from an empty step sequence".into()));
    }
    let mut cumsum = Vec::with_capacity(steps.len());
    let mut acc = 0.0f64;
    for &a in steps {
        let a = a.to_f64_lossy();
        if !(a > 0.0) {
            return Err(Error::Input(format!("step sizes must be positive, got {a}")));
        }
        acc += a;
        cumsum.push(acc);
    }
    let target = rng.random::<f64>() * acc;
    Ok(cumsum.iter().position(|&c| target <= c).unwrap_or(steps.len() - 1))
}

/// The randomness used at iteration `t`: `(ξ_t, W_t)`.
pub fn iteration_sample<T: Scalar>(problem: &CompositeProblem<T>, seed: u64, t: usize) -> (Scenario<T>, Vec<T>) {
    let key = StreamKey::root(seed).child("solver");
    let xi = problem.scenario_stream(key.child("scenario")).draw(t as u64);
    let w = sample_sphere(&mut key.child("direction").rng(t as u64), problem.dim()).expect("n >= 1");
    (xi, w)
}

fn selection_key(seed: u64) -> StreamKey {
    StreamKey::root(seed).child("solver").child("select")
}

/// Per-iteration trace entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepTrace<T> {
    pub alpha: T,
    pub grad_est_norm: T,
    pub plus_val: T,
    pub minus_val: T,
    /// `‖x_t‖`, the iterate at which the estimate was formed.
    pub x_norm: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord<T> {
    /// Kept iterates `(t, x_t)` in increasing `t`, a subset of `0..=T+1`.
    pub iterates: Vec<(usize, Vec<T>)>,
    pub step_sizes: Vec<T>,
    pub trace: Vec<StepTrace<T>>,
    pub t_star: usize,
    pub x_star: Vec<T>,
    pub wallclock_sec: f64,
    pub seed: u64,
    pub oracle_calls: u64,
    /// False when the run stopped early on an oracle error.
    pub complete: bool,
}

impl<T: Scalar> RunRecord<T> {
    pub fn horizon(&self) -> usize {
        self.step_sizes.len().saturating_sub(1)
    }

    pub fn iterate(&self, t: usize) -> Option<&[T]> {
        self.iterates
            .binary_search_by_key(&t, |(i, _)| *i)
            .ok()
            .map(|k| self.iterates[k].1.as_slice())
    }

    /// Last stored iterate.
    pub fn last(&self) -> &[T] {
        &self.iterates.last().expect("x_0 is always kept").1
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError<T: Scalar> {
    #[error(transparent)]
    Setup(#[from] Error),
    #[error("run aborted at t = {at}: {error}")]
    Aborted {
        at: usize,
        error: Error,
        partial: Box<RunRecord<T>>,
    },
}

impl<T: Scalar> SolverError<T> {
    pub fn partial(&self) -> Option<&RunRecord<T>> {
        match self {
            SolverError::Aborted { partial, .. } => Some(partial),
            SolverError::Setup(_) => None,
        }
    }
}

/// Runs `T + 1` iterations of Z-iProxSG from `config.x0`.
pub fn run_ziproxsg<T: Scalar>(
    problem: &CompositeProblem<T>,
    oracle: &InexactOracle<T>,
    config: &SolverConfig<T>,
) -> std::result::Result<RunRecord<T>, SolverError<T>> {
    let start = Instant::now();
    check_dim(problem.dim(), config.x0.len())?;
    config.validate(problem)?;
    let steps = step_schedule(problem, oracle, config)?;
    let horizon = config.horizon;
    let t_star = select_iterate(&steps, &mut selection_key(config.seed).rng(0))?;

    // Dense storage up to the cap, then every `stride`-th iterate.
    let total = horizon + 2;
    let stride = total.div_ceil(config.iterate_cap).max(1);
    let keep = |t: usize| t.is_multiple_of(stride) || t == t_star || t == horizon + 1 || config.pinned.contains(&t);
    debug!(
        "run seed={} T={horizon} alpha_0={} t*={t_star} stride={stride}",
        config.seed, steps[0]
    );

    let mut record = RunRecord {
        iterates: vec![(0, config.x0.clone())],
        step_sizes: steps.clone(),
        trace: Vec::with_capacity(horizon + 1),
        t_star,
        x_star: Vec::new(),
        wallclock_sec: 0.0,
        seed: config.seed,
        oracle_calls: 0,
        complete: false,
    };
    let mut x = config.x0.clone();
    for (t, &alpha) in steps.iter().enumerate() {
        if t == t_star {
            record.x_star = x.clone();
        }
        let (xi, w) = iteration_sample(problem, config.seed, t);
        let est = match two_point_estimate(oracle, &x, &xi, &w, config.mu) {
            Ok(e) => e,
            Err(e) => {
                record.oracle_calls += 2;
                record.wallclock_sec = start.elapsed().as_secs_f64();
                return Err(SolverError::Aborted {
                    at: t,
                    error: e.into(),
                    partial: Box::new(record),
                });
            }
        };
        record.oracle_calls += 2;
        record.trace.push(StepTrace {
            alpha,
            grad_est_norm: linalg::norm(&est.g),
            plus_val: est.plus_val,
            minus_val: est.minus_val,
            x_norm: linalg::norm(&x),
        });
        x = apply_prox(&problem.r, &linalg::add_scaled(&x, -alpha, &est.g), alpha)?;
        if keep(t + 1) {
            record.iterates.push((t + 1, x.clone()));
        }
    }
    record.complete = true;
    record.wallclock_sec = start.elapsed().as_secs_f64();
    Ok(record)
}

/// `Φ` estimate: `2 (φ̃_μ(x₀) - min_k φ̃_μ(z_k))` over random candidates `z_k`
/// drawn from `dom r` (or a unit box around `x₀` when the domain is unbounded).
pub fn estimate_phi_upper<T: Scalar>(
    problem: &CompositeProblem<T>,
    oracle: &InexactOracle<T>,
    x0: &[T],
    mu: T,
    candidates: usize,
    samples: usize,
    key: StreamKey,
) -> Result<T> {
    let n = problem.dim();
    check_dim(n, x0.len())?;
    let phi = |z: &[T], i: u64| -> Result<T> {
        let v = estimate_smoothed_value(problem, oracle, z, mu, samples, key.child("value").child_index(i))?;
        Ok(v.mean + problem.r.value(z))
    };
    let at_x0 = phi(x0, 0)?;
    let mut best = at_x0;
    for k in 0..candidates {
        let mut rng = key.child("candidate").rng(k as u64);
        let z: Vec<T> = match problem.r.box_bounds() {
            Some((lo, hi)) => lo
                .iter()
                .zip(hi)
                .map(|(&l, &h)| l + (h - l) * T::of(rng.random::<f64>()))
                .collect(),
            None => x0.iter().map(|&v| v + T::of(rng.random_range(-1.0..=1.0))).collect(),
        };
        let z = apply_prox(&problem.r, &z, T::one())?;
        best = best.min(phi(&z, k as u64 + 1)?);
    }
    let gap = T::of(2.0) * (at_x0 - best);
    Ok(gap.max(T::of(1e-8)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::make_exact_oracle;
    use crate::problem::{ClosureFunction, Regularizer, ScenarioLaw};
    use std::sync::Arc;

    fn problem(f: ClosureFunction<f64>, r: Regularizer<f64>) -> CompositeProblem<f64> {
        CompositeProblem::new(Arc::new(f), r, 1, ScenarioLaw::UniformCube).unwrap()
    }

    #[test]
    fn theorem_step_reference_value() {
        let a = theorem_step_size(1.0, 1.0, 1.0, 4, 0.1, 0.0, 99).unwrap();
        let k = 32.0 * (2.0 * std::f64::consts::PI).sqrt();
        let oracle = 1.0 / (4.0 * 8.0 * 10.0 * k * 100.0f64).sqrt();
        assert!((a - oracle).abs() < 1e-15);
        assert!((a - 6.242e-4).abs() < 1e-6);
    }

    #[test]
    fn theorem_step_monotone_and_scaling() {
        let base = theorem_step_size(1.0f64, 1.0, 1.0, 4, 0.1, 0.0, 99).unwrap();
        let noisy = theorem_step_size(1.0, 1.0, 1.0, 4, 0.1, 1e-3, 99).unwrap();
        assert!(noisy < base);
        let long = theorem_step_size(1.0, 1.0, 1.0, 4, 0.1, 0.0, 399).unwrap();
        assert!((long - base / 2.0).abs() < 1e-15);
        assert!(theorem_step_size(0.0, 1.0, 1.0, 4, 0.1, 0.0, 99).is_err());
        assert!(theorem_step_size(-1.0, 1.0, 1.0, 4, 0.1, 0.0, 99).is_err());
    }

    #[test]
    fn selection_edge_cases() {
        let mut rng = StreamKey::root(1).rng(0);
        assert!(select_iterate::<f64, _>(&[], &mut rng).is_err());
        for _ in 0..100 {
            assert_eq!(select_iterate(&[0.3], &mut rng).unwrap(), 0);
        }
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| select_iterate(&[1.0, 3.0], &mut rng).unwrap() == 1)
            .count() as f64;
        let sigma = (0.75 * 0.25 / n as f64).sqrt();
        assert!((hits / n as f64 - 0.75).abs() < 3.0 * sigma);
    }

    #[test]
    fn constant_steps_select_uniformly() {
        let mut rng = StreamKey::root(2).rng(0);
        let n = 100_000;
        let mut counts = [0usize; 5];
        for _ in 0..n {
            counts[select_iterate(&[0.1; 5], &mut rng).unwrap()] += 1;
        }
        let sigma = (0.2 * 0.8 / n as f64).sqrt();
        for c in counts {
            assert!((c as f64 / n as f64 - 0.2).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn constant_function_single_step() {
        let p = problem(ClosureFunction::constant(3, 2.5), Regularizer::Zero);
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let mut cfg = SolverConfig::new(vec![0.3, -0.1, 2.0], 0.1, 0, 5);
        cfg.step_mode = StepMode::Constant(0.1);
        let rec = run_ziproxsg(&p, &o, &cfg).unwrap();
        assert_eq!(rec.t_star, 0);
        assert_eq!(rec.iterate(1).unwrap(), &[0.3, -0.1, 2.0]);
        assert_eq!(rec.oracle_calls, 2);
        assert_eq!(o.calls(), 2);
    }

    #[test]
    fn one_dimensional_linear_descends_deterministically() {
        let p = problem(ClosureFunction::linear(vec![1.0]), Regularizer::Zero);
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let mut cfg = SolverConfig::new(vec![0.0], 0.1, 49, 11);
        cfg.step_mode = StepMode::Constant(0.01);
        let rec = run_ziproxsg(&p, &o, &cfg).unwrap();
        let mut expect = 0.0;
        for t in 0..=50 {
            assert!((rec.iterate(t).unwrap()[0] - expect).abs() < 1e-12);
            expect -= 0.01;
        }
    }

    #[test]
    fn runs_replay_bit_identically() {
        let p = problem(
            ClosureFunction::norm(4),
            Regularizer::uniform_box(4, -1.0, 1.0).unwrap(),
        );
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let mut cfg = SolverConfig::new(vec![0.5; 4], 0.05, 200, 3);
        cfg.phi_upper = 10.0;
        let a = run_ziproxsg(&p, &o, &cfg).unwrap();
        let b = run_ziproxsg(&p, &o, &cfg).unwrap();
        assert_eq!(a.iterates, b.iterates);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.t_star, b.t_star);
        assert_eq!(a.x_star, a.iterate(a.t_star).unwrap());
    }

    #[test]
    fn update_identity_and_feasibility() {
        let r = Regularizer::l1_plus_box(0.2, vec![-0.5; 3], vec![0.7; 3]).unwrap();
        let p = problem(ClosureFunction::norm(3), r.clone());
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let mut cfg = SolverConfig::new(vec![0.1, 0.2, -0.3], 0.1, 100, 9);
        cfg.step_mode = StepMode::Constant(0.02);
        let rec = run_ziproxsg(&p, &o, &cfg).unwrap();
        for t in 0..=100 {
            let x = rec.iterate(t).unwrap();
            let (_, w) = iteration_sample(&p, 9, t);
            let tr = rec.trace[t];
            let g = crate::smoothing::gradient_from_evaluations(tr.plus_val, tr.minus_val, &w, 0.1);
            let next = apply_prox(&r, &linalg::add_scaled(x, -tr.alpha, &g), tr.alpha).unwrap();
            assert_eq!(next.as_slice(), rec.iterate(t + 1).unwrap());
            assert!(r.contains(&next));
        }
    }

    #[test]
    fn oversized_constant_step_is_rejected() {
        let p = problem(ClosureFunction::norm(2), Regularizer::Zero);
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let mut cfg = SolverConfig::new(vec![0.0; 2], 0.1, 5, 1);
        // 1/ρ̄ = μ / (2 √2) ≈ 0.035
        cfg.step_mode = StepMode::Constant(0.05);
        assert!(matches!(
            run_ziproxsg(&p, &o, &cfg),
            Err(SolverError::Setup(Error::Config(_)))
        ));
        cfg.step_mode = StepMode::Custom(vec![0.01; 3]);
        assert!(run_ziproxsg(&p, &o, &cfg).is_err());
    }

    #[test]
    fn theorem_step_is_clipped() {
        let p = problem(ClosureFunction::norm(2), Regularizer::Zero);
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let mut cfg = SolverConfig::new(vec![0.0; 2], 0.1, 0, 1);
        cfg.phi_upper = 1e9;
        let steps = step_schedule(&p, &o, &cfg).unwrap();
        let cap = 1.0 / cfg.rho_bar(1.0, 2).unwrap();
        assert_eq!(steps, vec![cap]);
    }

    #[test]
    fn stride_keeps_t_star_and_endpoints() {
        let p = problem(ClosureFunction::norm(2), Regularizer::Zero);
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let mut cfg = SolverConfig::new(vec![1.0, 1.0], 0.1, 999, 4);
        cfg.iterate_cap = 10;
        cfg.pinned = vec![333];
        let rec = run_ziproxsg(&p, &o, &cfg).unwrap();
        assert!(rec.iterates.len() < 20);
        assert!(rec.iterate(0).is_some());
        assert!(rec.iterate(1000).is_some());
        assert!(rec.iterate(333).is_some());
        assert_eq!(rec.iterate(rec.t_star).unwrap(), rec.x_star.as_slice());
    }

    #[test]
    fn oracle_failure_returns_partial_record() {
        use crate::error::OracleError;
        let p = problem(ClosureFunction::norm(1), Regularizer::Zero);
        let o = InexactOracle::from_fn("flaky", 0.0, BiasMode::B1ConstantMean, None, |x: &[f64], _| {
            if x[0] < -0.05 {
                Err(OracleError::NonFinite)
            } else {
                Ok(x[0].abs())
            }
        })
        .unwrap();
        let mut cfg = SolverConfig::new(vec![0.0], 0.1, 10, 1);
        cfg.step_mode = StepMode::Constant(0.01);
        let err = run_ziproxsg(&p, &o, &cfg).unwrap_err();
        let partial = err.partial().unwrap();
        assert!(!partial.complete);
        assert_eq!(partial.trace.len(), 0);
        assert_eq!(partial.oracle_calls, 2);
    }

    #[test]
    fn single_precision_run() {
        let f = ClosureFunction::<f32>::norm(2);
        let p = CompositeProblem::new(Arc::new(f), Regularizer::Zero, 1, ScenarioLaw::UniformCube).unwrap();
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let mut cfg = SolverConfig::new(vec![1.0f32, -1.0], 0.1, 500, 2);
        cfg.step_mode = StepMode::Constant(0.03);
        let rec = run_ziproxsg(&p, &o, &cfg).unwrap();
        assert!(linalg::norm(rec.last()) < 1.0);
    }

    #[test]
    fn phi_estimate_is_positive() {
        let p = problem(
            ClosureFunction::norm(2),
            Regularizer::uniform_box(2, -1.0, 1.0).unwrap(),
        );
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let phi = estimate_phi_upper(&p, &o, &[1.0, 1.0], 0.05, 64, 64, StreamKey::root(0)).unwrap();
        assert!(phi > 1.0 && phi < 2.0 * 2f64.sqrt() + 0.2, "{phi}");
    }
}
