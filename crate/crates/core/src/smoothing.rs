//! Uniform ball smoothing `f_μ(x) = E{F(x + μU, ξ)}` and its two-point
//! zeroth-order gradient estimator.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, OracleError, Result};
use crate::linalg;
use crate::oracles::InexactOracle;
use crate::problem::{CompositeProblem, Scenario};
use crate::rng::StreamKey;
use crate::Scalar;

/// Batches below this size are evaluated on the calling thread.
const PARALLEL_THRESHOLD: usize = 512;

/// Smoothing radius and the dimension-free smoothness constant `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothingParams<T> {
    pub mu: T,
    pub c_const: T,
}

impl<T: Scalar> SmoothingParams<T> {
    pub fn new(mu: T, c_const: T) -> Result<Self> {
        if !(mu > T::zero()) || !mu.is_finite() {
            return Err(Error::Input(format!("smoothing radius must be > 0, got {mu}")));
        }
        if !(c_const > T::zero()) || !c_const.is_finite() {
            return Err(Error::Input(format!("smoothness constant must be > 0, got {c_const}")));
        }
        Ok(SmoothingParams { mu, c_const })
    }

    /// Weak-convexity modulus `ρ = c G √n / μ` of `f_μ`.
    pub fn weak_convexity(&self, lipschitz: T, n: usize) -> T {
        self.c_const * lipschitz * T::of_usize(n).sqrt() / self.mu
    }
}

/// Uniform draw from the unit sphere in `R^n` (normalized Gaussian).
pub fn sample_sphere<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::Input("sphere dimension must be >= 1".into()));
    }
    loop {
        let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let nrm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm > 0.0 && nrm.is_finite() {
            let w: Vec<T> = g.into_iter().map(|v| T::of(v)).collect();
            let nrm_t = linalg::norm(&w);
            return Ok(w.into_iter().map(|v| v / nrm_t).collect());
        }
    }
}

/// Uniform draw from the closed unit ball, `W · R^{1/n}` with `R ~ U[0, 1]`.
pub fn sample_ball<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Vec<T>> {
    let w: Vec<T> = sample_sphere(rng, n)?;
    let r: f64 = rng.random::<f64>();
    let radius = T::of(r.powf(1.0 / n as f64));
    Ok(linalg::scale(radius, &w))
}

/// `ln c_n` with `c_n = π^{n/2} / Γ(n/2 + 1)`, the volume of the unit ball.
pub fn ln_ball_volume_constant(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    h * std::f64::consts::PI.ln() - statrs::function::gamma::ln_gamma(h + 1.0)
}

/// `c_n`; underflows to zero for very large `n`, where
/// [`ln_ball_volume_constant`] should be used instead.
pub fn ball_volume_constant(n: usize) -> f64 {
    ln_ball_volume_constant(n).exp()
}

/// One two-point estimate together with the oracle values that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientEstimate<T> {
    pub g: Vec<T>,
    pub direction: Vec<T>,
    pub scenario: Scenario<T>,
    pub plus_val: T,
    pub minus_val: T,
}

/// `(n / 2μ) (plus - minus) W`.
pub fn gradient_from_evaluations<T: Scalar>(plus_val: T, minus_val: T, direction: &[T], mu: T) -> Vec<T> {
    let n = T::of_usize(direction.len());
    let coef = n / (T::of(2.0) * mu) * (plus_val - minus_val);
    direction.iter().map(|&w| coef * w).collect()
}

/// `G = (n / 2μ) (F̃(x + μW, ξ) - F̃(x - μW, ξ)) W`.
pub fn two_point_estimate<T: Scalar>(
    oracle: &InexactOracle<T>,
    x: &[T],
    scenario: &Scenario<T>,
    direction: &[T],
    mu: T,
) -> Result<GradientEstimate<T>, OracleError> {
    let plus = linalg::add_scaled(x, mu, direction);
    let minus = linalg::add_scaled(x, -mu, direction);
    let plus_val = oracle.eval(&plus, scenario)?;
    let minus_val = oracle.eval(&minus, scenario)?;
    Ok(GradientEstimate {
        g: gradient_from_evaluations(plus_val, minus_val, direction, mu),
        direction: direction.to_vec(),
        scenario: scenario.clone(),
        plus_val,
        minus_val,
    })
}

/// One-sided form `(n / μ) F̃(x + μW, ξ) W`; averaging it over `{W, -W}`
/// recovers [`two_point_estimate`].
pub fn one_sided_estimate<T: Scalar>(
    oracle: &InexactOracle<T>,
    x: &[T],
    scenario: &Scenario<T>,
    direction: &[T],
    mu: T,
) -> Result<Vec<T>, OracleError> {
    let v = oracle.eval(&linalg::add_scaled(x, mu, direction), scenario)?;
    let coef = T::of_usize(direction.len()) / mu * v;
    Ok(direction.iter().map(|&w| coef * w).collect())
}

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloValue<T> {
    pub mean: T,
    pub std_error: T,
}

/// Componentwise Monte Carlo mean with standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloGradient<T> {
    pub mean: Vec<T>,
    pub std_error: Vec<T>,
}

fn map_samples<T, F>(n: usize, f: F) -> Result<Vec<T>, OracleError>
where
    T: Send,
    F: Fn(u64) -> Result<T, OracleError> + Sync + Send,
{
    if n < PARALLEL_THRESHOLD {
        (0..n as u64).map(f).collect()
    } else {
        (0..n as u64).into_par_iter().map(f).collect()
    }
}

fn check_mu<T: Scalar>(mu: T) -> Result<()> {
    if mu > T::zero() && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::Input(format!("smoothing radius must be > 0, got {mu}")))
    }
}

/// Sample `i` of a batch draws its scenario from `key/"scenario"` and its
/// direction from `key/"direction"`, both at index `i`.
fn sample_pair<T: Scalar>(
    problem: &CompositeProblem<T>,
    key: StreamKey,
    i: u64,
) -> (Scenario<T>, rand_chacha::ChaCha8Rng) {
    let scenario = problem.scenario_stream(key.child("scenario")).draw(i);
    (scenario, key.child("direction").rng(i))
}

/// Estimates `f_μ(x)` (plus `E F̃` noise) from `N` i.i.d. pairs `(ξ, U)`.
pub fn estimate_smoothed_value<T: Scalar>(
    problem: &CompositeProblem<T>,
    oracle: &InexactOracle<T>,
    x: &[T],
    mu: T,
    num_samples: usize,
    key: StreamKey,
) -> Result<MonteCarloValue<T>> {
    check_mu(mu)?;
    if num_samples < 2 {
        return Err(Error::Input("need at least two samples".into()));
    }
    let n = problem.dim();
    crate::error::check_dim(n, x.len())?;
    let vals = map_samples(num_samples, |i| {
        let (xi, mut rng) = sample_pair(problem, key, i);
        let u: Vec<T> = sample_ball(&mut rng, n).expect("n >= 1");
        oracle.eval(&linalg::add_scaled(x, mu, &u), &xi)
    })?;
    let (mean, se) = mean_and_se(&vals);
    Ok(MonteCarloValue { mean, std_error: se })
}

/// Estimates `∇f_μ(x)` by averaging `N` independent two-point estimates.
pub fn estimate_smoothed_gradient<T: Scalar>(
    problem: &CompositeProblem<T>,
    oracle: &InexactOracle<T>,
    x: &[T],
    mu: T,
    num_samples: usize,
    key: StreamKey,
) -> Result<MonteCarloGradient<T>> {
    check_mu(mu)?;
    if num_samples == 0 {
        return Err(Error::Input("need at least one sample".into()));
    }
    let n = problem.dim();
    crate::error::check_dim(n, x.len())?;
    let grads = map_samples(num_samples, |i| {
        let (xi, mut rng) = sample_pair(problem, key, i);
        let w: Vec<T> = sample_sphere(&mut rng, n).expect("n >= 1");
        two_point_estimate(oracle, x, &xi, &w, mu).map(|e| e.g)
    })?;
    let mut mean = vec![T::zero(); n];
    let mut std_error = vec![T::zero(); n];
    let mut column = Vec::with_capacity(num_samples);
    for j in 0..n {
        column.clear();
        column.extend(grads.iter().map(|g| g[j]));
        let (m, se) = mean_and_se(&column);
        mean[j] = m;
        std_error[j] = se;
    }
    Ok(MonteCarloGradient { mean, std_error })
}

/// Sample mean and standard error of the mean (zero for a single sample).
pub fn mean_and_se<T: Scalar>(vals: &[T]) -> (T, T) {
    let k = T::of_usize(vals.len());
    let mean = vals.iter().copied().sum::<T>() / k;
    if vals.len() < 2 {
        return (mean, T::zero());
    }
    let ss: T = vals.iter().map(|&v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (k - T::one()) / k).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::make_exact_oracle;
    use crate::problem::{ClosureFunction, Regularizer, ScenarioLaw};
    use std::sync::Arc;

    fn problem_of(f: ClosureFunction<f64>) -> CompositeProblem<f64> {
        CompositeProblem::new(Arc::new(f), Regularizer::Zero, 1, ScenarioLaw::UniformCube).unwrap()
    }

    #[test]
    fn zero_sphere_is_two_points_with_equal_mass() {
        let key = StreamKey::root(1);
        let draws = 10_000;
        let mut plus = 0usize;
        for i in 0..draws {
            let w: Vec<f64> = sample_sphere(&mut key.rng(i), 1).unwrap();
            assert!(w[0] == 1.0 || w[0] == -1.0);
            if w[0] > 0.0 {
                plus += 1;
            }
        }
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((plus as f64 - draws as f64 / 2.0).abs() <= 3.0 * sigma, "{plus}");
    }

    #[test]
    fn sphere_draws_have_unit_norm() {
        let key = StreamKey::root(2);
        for n in [1usize, 2, 3, 7, 50] {
            for i in 0..200 {
                let w: Vec<f64> = sample_sphere(&mut key.rng(i), n).unwrap();
                assert!((linalg::norm(&w) - 1.0).abs() < 1e-12);
            }
        }
        assert!(sample_sphere::<f64, _>(&mut key.rng(0), 0).is_err());
    }

    #[test]
    fn sphere_second_moment_is_isotropic() {
        let key = StreamKey::root(3);
        let draws = 100_000u64;
        let mut m = [[0.0; 3]; 3];
        for i in 0..draws {
            let w: Vec<f64> = sample_sphere(&mut key.rng(i), 3).unwrap();
            for a in 0..3 {
                for b in 0..3 {
                    m[a][b] += w[a] * w[b];
                }
            }
        }
        for (a, row) in m.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                let target = if a == b { 1.0 / 3.0 } else { 0.0 };
                assert!((v / draws as f64 - target).abs() < 0.01);
            }
        }
    }

    #[test]
    fn ball_draws_fill_the_disk_uniformly() {
        let key = StreamKey::root(4);
        let draws = 100_000u64;
        let mut inner = 0usize;
        for i in 0..draws {
            let u: Vec<f64> = sample_ball(&mut key.rng(i), 2).unwrap();
            let r = linalg::norm(&u);
            assert!(r <= 1.0);
            if r <= 0.5 {
                inner += 1;
            }
        }
        let p = 0.25;
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((inner as f64 / draws as f64 - p).abs() <= 3.0 * sigma);

        let mut vals = Vec::new();
        for i in 0..draws {
            let u: Vec<f64> = sample_ball(&mut key.child("1d").rng(i), 1).unwrap();
            vals.push(u[0]);
        }
        let (mean, se) = mean_and_se(&vals);
        assert!(mean.abs() <= 3.0 * se);
    }

    #[test]
    fn ball_volume_constants() {
        assert!((ball_volume_constant(1) - 2.0).abs() < 1e-12);
        assert!((ball_volume_constant(2) - std::f64::consts::PI).abs() < 1e-12);
        // odd-n formula: Γ(n/2 + 1) = √π n!! / 2^{(n+1)/2}
        let double_fact_3 = 3.0;
        let gamma = std::f64::consts::PI.sqrt() * double_fact_3 / 4.0;
        let c3 = std::f64::consts::PI.powf(1.5) / gamma;
        assert!((ball_volume_constant(3) - c3).abs() < 1e-12);
        assert!((ball_volume_constant(3) - 4.188_790_20).abs() < 1e-8);
        assert!(ln_ball_volume_constant(100_000).is_finite());
        assert!(ln_ball_volume_constant(100_000) < -200_000.0);
    }

    #[test]
    fn estimator_algebra() {
        let xi = Scenario::new(vec![0.0]);
        let c = make_exact_oracle(Arc::new(ClosureFunction::constant(3, 2.5))).unwrap();
        let w = [0.6, 0.0, -0.8];
        let e = two_point_estimate(&c, &[1.0, 2.0, 3.0], &xi, &w, 0.1).unwrap();
        assert!(e.g.iter().all(|&v| v == 0.0));

        let a = vec![1.0f64, -2.0, 0.5];
        let lin = make_exact_oracle(Arc::new(ClosureFunction::linear(a.clone()))).unwrap();
        let e = two_point_estimate(&lin, &[0.3, 0.1, -4.0], &xi, &w, 0.05).unwrap();
        let aw = linalg::dot(&a, &w);
        for (g, wi) in e.g.iter().zip(&w) {
            assert!((g - 3.0 * aw * wi).abs() < 1e-12);
        }
        assert_eq!(lin.calls(), 2);

        let nrm = make_exact_oracle(Arc::new(ClosureFunction::norm(3))).unwrap();
        let key = StreamKey::root(8);
        for i in 0..100 {
            let w: Vec<f64> = sample_sphere(&mut key.rng(i), 3).unwrap();
            let x = [i as f64 * 0.1 - 5.0, 0.2, -0.7];
            let e = two_point_estimate(&nrm, &x, &xi, &w, 0.3).unwrap();
            assert!(linalg::norm(&e.g) <= 3.0 + 1e-12);
        }
    }

    #[test]
    fn antithetic_one_sided_pair_reproduces_two_point() {
        let xi = Scenario::new(vec![0.0]);
        let oracle = make_exact_oracle(Arc::new(ClosureFunction::norm(4))).unwrap();
        let key = StreamKey::root(12);
        for i in 0..50 {
            let w: Vec<f64> = sample_sphere(&mut key.rng(i), 4).unwrap();
            let neg: Vec<f64> = w.iter().map(|v| -v).collect();
            let x = [0.5, -1.0, 0.25 * i as f64, 2.0];
            let a = one_sided_estimate(&oracle, &x, &xi, &w, 0.2).unwrap();
            let b = one_sided_estimate(&oracle, &x, &xi, &neg, 0.2).unwrap();
            let two = two_point_estimate(&oracle, &x, &xi, &w, 0.2).unwrap();
            for j in 0..4 {
                let avg = 0.5 * (a[j] + b[j]);
                assert!((avg - two.g[j]).abs() <= 1e-12 * (1.0 + two.g[j].abs()));
            }
        }
    }

    #[test]
    fn smoothed_value_of_quadratic_at_origin() {
        let p = problem_of(ClosureFunction::half_square(2, 1.0));
        let oracle = make_exact_oracle(p.f.clone()).unwrap();
        let v = estimate_smoothed_value(&p, &oracle, &[0.0, 0.0], 1.0, 20_000, StreamKey::root(5)).unwrap();
        assert!((v.mean - 0.25).abs() <= 3.0 * v.std_error, "{v:?}");
    }

    #[test]
    fn smoothed_value_of_linear_is_exact_in_expectation() {
        let a = vec![0.5, -1.5];
        let p = problem_of(ClosureFunction::linear(a.clone()));
        let oracle = make_exact_oracle(p.f.clone()).unwrap();
        let x = [2.0, 1.0];
        let v = estimate_smoothed_value(&p, &oracle, &x, 0.5, 20_000, StreamKey::root(6)).unwrap();
        assert!((v.mean - linalg::dot(&a, &x)).abs() <= 3.0 * v.std_error);
        assert!(estimate_smoothed_value(&p, &oracle, &x, 0.5, 1, StreamKey::root(6)).is_err());
    }

    #[test]
    fn smoothed_gradient_of_constant_is_zero() {
        let p = problem_of(ClosureFunction::constant(3, 1.0));
        let oracle = make_exact_oracle(p.f.clone()).unwrap();
        let g = estimate_smoothed_gradient(&p, &oracle, &[1.0, 2.0, 3.0], 0.1, 1000, StreamKey::root(7)).unwrap();
        assert!(g.mean.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn batch_output_does_not_depend_on_parallelism() {
        let p = problem_of(ClosureFunction::norm(3));
        let oracle = make_exact_oracle(p.f.clone()).unwrap();
        let x = [0.3, -0.1, 0.8];
        let key = StreamKey::root(99);
        let big = estimate_smoothed_gradient(&p, &oracle, &x, 0.1, 2 * PARALLEL_THRESHOLD, key).unwrap();
        // sequential recomputation of the same samples
        let mut acc = [0.0; 3];
        for i in 0..(2 * PARALLEL_THRESHOLD) as u64 {
            let (xi, mut rng) = sample_pair(&p, key, i);
            let w: Vec<f64> = sample_sphere(&mut rng, 3).unwrap();
            let e = two_point_estimate(&oracle, &x, &xi, &w, 0.1).unwrap();
            for (a, g) in acc.iter_mut().zip(e.g) {
                *a += g;
            }
        }
        for (a, m) in acc.iter().zip(&big.mean) {
            assert_eq!((a / (2 * PARALLEL_THRESHOLD) as f64).to_bits(), m.to_bits());
        }
    }
}
