//! Moreau-envelope stationarity certificates for `φ_μ = f_μ + r` and a
//! sampled Goldstein min-norm diagnostic.
//!
//! The certificate approximates `x̂ = prox_{λφ_μ}(x)` by proximal stochastic
//! gradient on the strongly convex subproblem
//! `min_w φ_μ(w) + ‖w - x‖² / (2λ)` and reports `‖x - x̂‖ / λ`.

use log::debug;

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::oracles::InexactOracle;
use crate::problem::{CompositeProblem, Regularizer};
use crate::prox::apply_prox;
use crate::rng::StreamKey;
use crate::smoothing::{estimate_smoothed_gradient, sample_ball, SmoothingParams};
use crate::Scalar;

/// Consecutive residual increases tolerated before declaring divergence.
const DIVERGENCE_WINDOW: usize = 100;

/// Budget and schedule of the inner proximal stochastic gradient loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerSettings<T> {
    pub iters: usize,
    /// Two-point estimates averaged per inner step.
    pub batch: usize,
    /// Initial step `η₀`; `None` means `λ / 2`.
    pub step: Option<T>,
}

impl<T: Scalar> Default for InnerSettings<T> {
    fn default() -> Self {
        InnerSettings {
            iters: 400,
            batch: 64,
            step: None,
        }
    }
}

/// Result of [`estimate_prox_point`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProxEstimate<T> {
    pub x_hat: Vec<T>,
    /// `‖w_K - w_{K-1}‖ / η_{K-1}` at the last step.
    pub residual: T,
    pub iters: usize,
    pub oracle_calls: u64,
}

/// Approximates `prox_{λφ_μ}(x)`; `strong_convexity` is the subproblem
/// modulus `1/λ - ρ`, which sets the decay `η_k = η₀ / (1 + k σ η₀)`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_prox_point<T: Scalar>(
    problem: &CompositeProblem<T>,
    oracle: &InexactOracle<T>,
    x: &[T],
    mu: T,
    lambda: T,
    strong_convexity: T,
    inner: &InnerSettings<T>,
    key: StreamKey,
) -> Result<ProxEstimate<T>> {
    check_dim(problem.dim(), x.len())?;
    if !(lambda > T::zero()) {
        return Err(Error::Input(format!("lambda must be > 0, got {lambda}")));
    }
    if !(strong_convexity > T::zero()) {
        return Err(Error::Input(format!(
            "subproblem is not strongly convex (modulus {strong_convexity}); need lambda < 1/rho"
        )));
    }
    if inner.iters == 0 || inner.batch == 0 {
        return Err(Error::Input("inner iterations and batch must be >= 1".into()));
    }
    let eta0 = inner.step.unwrap_or(lambda / T::of(2.0));
    if !(eta0 > T::zero()) {
        return Err(Error::Input(format!("inner step must be > 0, got {eta0}")));
    }
    let tail_start = inner.iters - (inner.iters / 4).max(1);
    let mut w = apply_prox(&problem.r, x, eta0)?;
    let mut tail = vec![T::zero(); x.len()];
    let mut tail_count = 0usize;
    let mut residual = T::zero();
    let mut rising = 0usize;
    // Growth below this level is rounding noise amplified by the shrinking step.
    let floor = T::epsilon().sqrt() * (T::one() + linalg::norm(x)) / lambda;
    let start_calls = oracle.calls();

    for k in 0..inner.iters {
        let eta = eta0 / (T::one() + T::of_usize(k) * strong_convexity * eta0);
        let g = estimate_smoothed_gradient(problem, oracle, &w, mu, inner.batch, key.child_index(k as u64))?;
        let step: Vec<T> = g
            .mean
            .iter()
            .zip(w.iter().zip(x))
            .map(|(&gi, (&wi, &xi))| wi - eta * (gi + (wi - xi) / lambda))
            .collect();
        let next = apply_prox(&problem.r, &step, eta)?;
        let res = linalg::dist(&next, &w) / eta;
        if !res.is_finite() || !linalg::is_finite(&next) {
            return Err(Error::Certification(format!(
                "inner iterate became non-finite at k = {k}"
            )));
        }
        rising = if k > 0 && res > residual && res > floor {
            rising + 1
        } else {
            0
        };
        if rising >= DIVERGENCE_WINDOW {
            return Err(Error::Certification(format!(
                "inner residual grew for {DIVERGENCE_WINDOW} consecutive steps (k = {k}, residual {res})"
            )));
        }
        residual = res;
        w = next;
        if k >= tail_start {
            tail_count += 1;
            let c = T::of_usize(tail_count);
            for (t, &wi) in tail.iter_mut().zip(&w) {
                *t = *t + (wi - *t) / c;
            }
        }
    }
    Ok(ProxEstimate {
        x_hat: tail,
        residual,
        iters: inner.iters,
        oracle_calls: oracle.calls() - start_calls,
    })
}

/// `‖x - x̂‖ / λ`.
pub fn envelope_gradient_norm<T: Scalar>(x: &[T], x_hat: &[T], lambda: T) -> Result<T> {
    check_dim(x.len(), x_hat.len())?;
    if !(lambda > T::zero()) {
        return Err(Error::Input(format!("lambda must be > 0, got {lambda}")));
    }
    Ok(linalg::dist(x, x_hat) / lambda)
}

/// Parameters of [`certify`].
#[derive(Clone, Debug, PartialEq)]
pub struct CertifyParams<T> {
    /// Envelope parameter; `None` means `(2ρ)⁻¹`.
    pub lambda: Option<T>,
    /// Weak-convexity modulus used for the subproblem; `None` means `c G √n / μ`.
    pub rho: Option<T>,
    pub c_const: T,
    pub inner: InnerSettings<T>,
    pub seed: u64,
}

impl<T: Scalar> Default for CertifyParams<T> {
    fn default() -> Self {
        CertifyParams {
            lambda: None,
            rho: None,
            c_const: T::one(),
            inner: InnerSettings::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<T> {
    pub x: Vec<T>,
    pub x_hat: Vec<T>,
    pub lambda: T,
    pub mu: T,
    pub rho: T,
    pub epsilon: T,
    pub env_grad_norm: T,
    pub pass: bool,
    pub inner_iters: usize,
    pub inner_residual: T,
    /// Two-point estimates consumed (`iters × batch`).
    pub mc_samples: usize,
    pub oracle_calls: u64,
    /// Radius `λε` at which `x` is Goldstein stationary for `φ_μ` when `pass`.
    pub goldstein_radius_smoothed: T,
    /// Radius `λε + μ` for the unsmoothed `φ`, reported when `r = 0`.
    pub goldstein_radius_original: Option<T>,
    /// `4 δ̃ D n / μ`, the extra error term for bounded-only oracles on a
    /// compact domain.
    pub oracle_error_term: Option<T>,
}

impl<T: Scalar> Certificate<T> {
    pub fn summary(&self) -> String {
        let mut s = format!(
            "env_grad_norm = {} ({} eps = {}), lambda = {}, mu = {}",
            self.env_grad_norm,
            if self.pass { "<=" } else { ">" },
            self.epsilon,
            self.lambda,
            self.mu
        );
        if self.pass {
            s.push_str(&format!(
                "; ({}, {})-Goldstein stationary for phi_mu",
                self.goldstein_radius_smoothed, self.epsilon
            ));
            if let Some(r) = self.goldstein_radius_original {
                s.push_str(&format!("; ({r}, {})-Goldstein stationary for phi", self.epsilon));
            }
        }
        s
    }
}

/// Resolves `(ρ, λ)` for a problem and validates `λ < ρ⁻¹`.
pub fn envelope_parameters<T: Scalar>(
    problem: &CompositeProblem<T>,
    mu: T,
    params: &CertifyParams<T>,
) -> Result<(T, T)> {
    let rho = match params.rho {
        Some(r) if r >= T::zero() => r,
        Some(r) => return Err(Error::Input(format!("rho must be >= 0, got {r}"))),
        None => SmoothingParams::new(mu, params.c_const)?.weak_convexity(problem.lipschitz_bound(), problem.dim()),
    };
    let lambda = match params.lambda {
        Some(l) => l,
        None if rho > T::zero() => T::one() / (T::of(2.0) * rho),
        None => return Err(Error::Input("lambda must be given when rho = 0".into())),
    };
    if !(lambda > T::zero()) || (rho > T::zero() && lambda * rho >= T::one()) {
        return Err(Error::Input(format!(
            "lambda must lie in (0, 1/rho) = (0, {}), got {lambda}",
            T::one() / rho
        )));
    }
    Ok((rho, lambda))
}

/// Checks `‖∇e_λ φ_μ(x)‖ <= ε`.
pub fn certify<T: Scalar>(
    problem: &CompositeProblem<T>,
    oracle: &InexactOracle<T>,
    x: &[T],
    mu: T,
    epsilon: T,
    params: &CertifyParams<T>,
) -> Result<Certificate<T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::Input(format!("epsilon must be > 0, got {epsilon}")));
    }
    let (rho, lambda) = envelope_parameters(problem, mu, params)?;
    let sigma = T::one() / lambda - rho;
    let key = StreamKey::root(params.seed).child("certify");
    let est = estimate_prox_point(problem, oracle, x, mu, lambda, sigma, &params.inner, key)?;
    let env_grad_norm = envelope_gradient_norm(x, &est.x_hat, lambda)?;
    let pass = env_grad_norm <= epsilon;
    debug!(
        "certify: |grad e| = {env_grad_norm}, lambda = {lambda}, residual = {}",
        est.residual
    );
    let n = T::of_usize(problem.dim());
    let oracle_error_term = match problem.r.diameter() {
        Some(d) if oracle.delta_bound() > T::zero() => Some(T::of(4.0) * oracle.delta_bound() * d * n / mu),
        _ => None,
    };
    Ok(Certificate {
        x: x.to_vec(),
        x_hat: est.x_hat,
        lambda,
        mu,
        rho,
        epsilon,
        env_grad_norm,
        pass,
        inner_iters: est.iters,
        inner_residual: est.residual,
        mc_samples: params.inner.iters * params.inner.batch,
        oracle_calls: est.oracle_calls,
        goldstein_radius_smoothed: lambda * epsilon,
        goldstein_radius_original: matches!(problem.r, Regularizer::Zero).then(|| lambda * epsilon + mu),
        oracle_error_term,
    })
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex<T: Scalar>(v: &[T]) -> Vec<T> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumsum = T::zero();
    let mut theta = T::zero();
    for (j, &uj) in u.iter().enumerate() {
        cumsum = cumsum + uj;
        let t = (cumsum - T::one()) / T::of_usize(j + 1);
        if uj - t > T::zero() {
            theta = t;
        }
    }
    v.iter().map(|&vi| (vi - theta).max(T::zero())).collect()
}

/// Minimum-norm point of the convex hull of `grads`.
#[derive(Clone, Debug, PartialEq)]
pub struct MinNorm<T> {
    pub weights: Vec<T>,
    pub point: Vec<T>,
    pub norm: T,
}

/// Minimizes `½‖Σ wᵢ gᵢ‖²` over the simplex with 10³ accelerated projected
/// gradient steps of length `1 / Σ‖gᵢ‖²` (an upper bound on the Gram
/// spectral radius). The returned norm upper-bounds the hull distance to 0.
pub fn goldstein_min_norm<T: Scalar>(grads: &[Vec<T>]) -> Result<MinNorm<T>> {
    let k = grads.len();
    if k == 0 {
        return Err(Error::Input("need at least one gradient".into()));
    }
    let n = grads[0].len();
    for g in grads {
        check_dim(n, g.len())?;
    }
    let combine = |w: &[T]| -> Vec<T> {
        let mut p = vec![T::zero(); n];
        for (wi, g) in w.iter().zip(grads) {
            for (pj, &gj) in p.iter_mut().zip(g) {
                *pj = *pj + *wi * gj;
            }
        }
        p
    };
    let trace: T = grads.iter().map(|g| linalg::norm_sq(g)).sum();
    let mut w = vec![T::one() / T::of_usize(k); k];
    if trace > T::zero() && k > 1 {
        let step = T::one() / trace;
        let mut y = w.clone();
        let mut t = T::one();
        for _ in 0..1000 {
            let p = combine(&y);
            let grad: Vec<T> = grads.iter().map(|g| linalg::dot(g, &p)).collect();
            let next = project_simplex(&linalg::add_scaled(&y, -step, &grad));
            let t_next = (T::one() + (T::one() + T::of(4.0) * t * t).sqrt()) / T::of(2.0);
            let beta = (t - T::one()) / t_next;
            y = next.iter().zip(&w).map(|(&a, &b)| a + beta * (a - b)).collect();
            w = next;
            t = t_next;
        }
    }
    let point = combine(&w);
    let norm = linalg::norm(&point);
    Ok(MinNorm {
        weights: w,
        point,
        norm,
    })
}

/// Sampled inner approximation of the Goldstein subdifferential of `f_μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GoldsteinDiagnostic<T> {
    pub radius: T,
    pub sampled_grads: Vec<Vec<T>>,
    pub min_norm_point: Vec<T>,
    pub min_norm: T,
    pub weights: Vec<T>,
}

/// Estimates `∇f_μ` at `points` uniform in the `radius`-ball around `center`
/// (the center itself first) and returns the min-norm hull element.
#[allow(clippy::too_many_arguments)]
pub fn goldstein_diagnostic<T: Scalar>(
    problem: &CompositeProblem<T>,
    oracle: &InexactOracle<T>,
    center: &[T],
    radius: T,
    mu: T,
    points: usize,
    batch: usize,
    key: StreamKey,
) -> Result<GoldsteinDiagnostic<T>> {
    check_dim(problem.dim(), center.len())?;
    if points == 0 {
        return Err(Error::Input("need at least one sample point".into()));
    }
    let mut grads = Vec::with_capacity(points);
    for i in 0..points {
        let y = if i == 0 {
            center.to_vec()
        } else {
            let u: Vec<T> = sample_ball(&mut key.child("points").rng(i as u64), center.len())?;
            linalg::add_scaled(center, radius, &u)
        };
        let g = estimate_smoothed_gradient(problem, oracle, &y, mu, batch, key.child("grads").child_index(i as u64))?;
        grads.push(g.mean);
    }
    let mn = goldstein_min_norm(&grads)?;
    Ok(GoldsteinDiagnostic {
        radius,
        sampled_grads: grads,
        min_norm_point: mn.point,
        min_norm: mn.norm,
        weights: mn.weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::make_exact_oracle;
    use crate::problem::{ClosureFunction, ScenarioLaw};
    use crate::prox::huber_envelope_abs;
    use std::sync::Arc;

    fn problem(f: ClosureFunction<f64>) -> CompositeProblem<f64> {
        CompositeProblem::new(Arc::new(f), Regularizer::Zero, 1, ScenarioLaw::UniformCube).unwrap()
    }

    fn convex_params(lambda: f64, iters: usize, batch: usize) -> CertifyParams<f64> {
        CertifyParams {
            lambda: Some(lambda),
            rho: Some(0.0),
            inner: InnerSettings {
                iters,
                batch,
                step: None,
            },
            ..CertifyParams::default()
        }
    }

    #[test]
    fn zero_function_is_its_own_prox() {
        let p = problem(ClosureFunction::constant(3, 0.0));
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let x = [0.4, -1.0, 2.0];
        let c = certify(&p, &o, &x, 0.1, 1e-9, &convex_params(0.5, 50, 4)).unwrap();
        assert_eq!(c.x_hat, x.to_vec());
        assert_eq!(c.env_grad_norm, 0.0);
        assert!(c.pass);
        assert_eq!(c.goldstein_radius_original, Some(0.5 * 1e-9 + 0.1));
    }

    #[test]
    fn absolute_value_prox_matches_soft_threshold() {
        let p = problem(ClosureFunction::norm(1));
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let c = certify(&p, &o, &[3.0], 1e-3, 0.5, &convex_params(1.0, 2000, 2)).unwrap();
        assert!((c.x_hat[0] - 2.0).abs() < 1e-2, "{:?}", c.x_hat);
        let (_, g) = huber_envelope_abs(3.0, 1.0).unwrap();
        assert!((c.env_grad_norm - g).abs() < 5e-3);
        assert!(!c.pass);
    }

    #[test]
    fn quadratic_prox_shrinks_toward_origin() {
        let p = problem(ClosureFunction::half_square(2, 10.0));
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let x = [1.0, -2.0];
        let lambda = 0.5;
        let c = certify(&p, &o, &x, 0.01, 1.0, &convex_params(lambda, 2000, 32)).unwrap();
        for (h, xi) in c.x_hat.iter().zip(x) {
            assert!((h - xi / (1.0 + lambda)).abs() < 2e-2, "{:?}", c.x_hat);
        }
    }

    #[test]
    fn lambda_must_stay_below_inverse_rho() {
        let p = problem(ClosureFunction::norm(2));
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let params = CertifyParams {
            lambda: Some(1.0),
            ..CertifyParams::default()
        };
        assert!(certify(&p, &o, &[1.0, 1.0], 0.1, 0.1, &params).is_err());
        let (rho, lambda) = envelope_parameters(&p, 0.1, &CertifyParams::default()).unwrap();
        assert!((rho - 2f64.sqrt() / 0.1).abs() < 1e-12);
        assert!((lambda * rho - 0.5).abs() < 1e-12);
    }

    #[test]
    fn norm_far_from_origin_fails_small_epsilon() {
        let p = problem(ClosureFunction::norm(2));
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let params = CertifyParams {
            inner: InnerSettings {
                iters: 400,
                batch: 64,
                step: None,
            },
            ..CertifyParams::default()
        };
        let c = certify(&p, &o, &[3.0, 4.0], 0.1, 0.1, &params).unwrap();
        assert!(!c.pass);
        assert!((c.env_grad_norm - 1.0).abs() < 0.1, "{}", c.env_grad_norm);
    }

    #[test]
    fn norm_at_origin_passes() {
        let p = problem(ClosureFunction::norm(2));
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let params = CertifyParams {
            inner: InnerSettings {
                iters: 400,
                batch: 256,
                step: None,
            },
            ..CertifyParams::default()
        };
        let c = certify(&p, &o, &[0.0, 0.0], 0.1, 0.05, &params).unwrap();
        assert!(c.pass, "{}", c.env_grad_norm);
    }

    #[test]
    fn simplex_projection_properties() {
        let p = project_simplex(&[0.2f64, 0.3, 0.5]);
        assert_eq!(p, vec![0.2, 0.3, 0.5]);
        let p = project_simplex(&[5.0f64, 0.0]);
        assert_eq!(p, vec![1.0, 0.0]);
        let p = project_simplex(&[0.0f64, 0.0]);
        assert_eq!(p, vec![0.5, 0.5]);
    }

    #[test]
    fn min_norm_examples() {
        let m = goldstein_min_norm(&[vec![1.0f64, 0.0], vec![-1.0, 0.0]]).unwrap();
        assert!(m.norm < 1e-9);
        let m = goldstein_min_norm(&[vec![0.6f64, -0.8]]).unwrap();
        assert_eq!(m.point, vec![0.6, -0.8]);
        assert!((m.norm - 1.0).abs() < 1e-15);
        let m = goldstein_min_norm(&[vec![2.0f64], vec![4.0]]).unwrap();
        assert!((m.point[0] - 2.0).abs() < 1e-9 && (m.norm - 2.0).abs() < 1e-9);
        let s: f64 = m.weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-12 && m.weights.iter().all(|&w| w >= 0.0));
        assert!(goldstein_min_norm::<f64>(&[]).is_err());
    }

    #[test]
    fn min_norm_matches_segment_formula() {
        // Closest point of the segment [a, b] to the origin.
        let a = [1.0f64, 2.0];
        let b = [3.0, -1.0];
        let m = goldstein_min_norm(&[a.to_vec(), b.to_vec()]).unwrap();
        let d = [b[0] - a[0], b[1] - a[1]];
        let t = (-(a[0] * d[0] + a[1] * d[1]) / (d[0] * d[0] + d[1] * d[1])).clamp(0.0, 1.0);
        let q = [a[0] + t * d[0], a[1] + t * d[1]];
        assert!((m.norm - (q[0] * q[0] + q[1] * q[1]).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn diagnostic_at_kink_spans_zero() {
        let p = problem(ClosureFunction::norm(1));
        let o = make_exact_oracle(p.f.clone()).unwrap();
        let d = goldstein_diagnostic(&p, &o, &[0.0], 0.5, 0.01, 30, 4, StreamKey::root(3)).unwrap();
        assert!(d.min_norm < 1e-6);
        assert_eq!(d.sampled_grads.len(), 30);
    }
}
