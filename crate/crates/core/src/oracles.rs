//! Inexact noisy oracles `F̃(x, ξ) = F(x, ξ) + δ(x, ξ)` with `|δ| <= δ̃`.
//!
//! Three families are provided: exact wrappers around closed-form functions,
//! deterministic hash-based noise injection, and truncated inner solvers for
//! functions defined as the optimal value of an inner problem. Every oracle is
//! a pure function of `(x, ξ)`; repeated queries are bit-identical.

use std::fmt::Debug;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, OracleError, Result};
use crate::linalg;
use crate::problem::{Scenario, StochasticFunction};
use crate::rng::{hash_words, mix64};
use crate::Scalar;

/// Which moment condition on the oracle error the caller may rely on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasMode {
    /// `E_ξ{δ(x, ξ)} = Δ` for every `x`.
    B1ConstantMean,
    /// Only `|δ| <= δ̃` is known; the domain of `r` must be compact.
    B2BoundedOnly,
}

type QueryFn<T> = dyn Fn(&[T], &Scenario<T>) -> Result<T, OracleError> + Send + Sync;

/// Callable oracle plus its error contract. Clones share the call counter.
#[derive(Clone)]
pub struct InexactOracle<T> {
    query: Arc<QueryFn<T>>,
    delta_bound: T,
    bias_mode: BiasMode,
    known_bias: Option<T>,
    label: String,
    calls: Arc<AtomicU64>,
}

impl<T: Scalar> Debug for InexactOracle<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InexactOracle")
            .field("label", &self.label)
            .field("delta_bound", &self.delta_bound)
            .field("bias_mode", &self.bias_mode)
            .field("known_bias", &self.known_bias)
            .field("calls", &self.calls())
            .finish()
    }
}

impl<T: Scalar> InexactOracle<T> {
    pub fn from_fn(
        label: impl Into<String>,
        delta_bound: T,
        bias_mode: BiasMode,
        known_bias: Option<T>,
        query: impl Fn(&[T], &Scenario<T>) -> Result<T, OracleError> + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(delta_bound >= T::zero()) || !delta_bound.is_finite() {
            return Err(Error::Input(format!(
                "oracle error bound must be >= 0, got {delta_bound}"
            )));
        }
        Ok(InexactOracle {
            query: Arc::new(query),
            delta_bound,
            bias_mode,
            known_bias,
            label: label.into(),
            calls: Arc::new(AtomicU64::new(0)),
        })
    }

    /// `F̃(x, ξ)`.
    pub fn eval(&self, x: &[T], xi: &Scenario<T>) -> Result<T, OracleError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let v = (self.query)(x, xi)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(OracleError::NonFinite)
        }
    }

    pub fn delta_bound(&self) -> T {
        self.delta_bound
    }

    pub fn bias_mode(&self) -> BiasMode {
        self.bias_mode
    }

    pub fn known_bias(&self) -> Option<T> {
        self.known_bias
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of [`InexactOracle::eval`] calls through this oracle and its clones.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// Same oracle with an independent call counter starting at zero.
    pub fn with_fresh_counter(&self) -> Self {
        InexactOracle {
            calls: Arc::new(AtomicU64::new(0)),
            ..self.clone()
        }
    }
}

/// `δ̃ = 0` wrapper around a closed-form function.
pub fn make_exact_oracle<T: Scalar>(f: Arc<dyn StochasticFunction<T>>) -> Result<InexactOracle<T>> {
    if !f.has_closed_form() {
        return Err(Error::Unsupported(format!(
            "{} has no closed form; use an inner-solver oracle",
            f.name()
        )));
    }
    let label = format!("exact({})", f.name());
    InexactOracle::from_fn(
        label,
        T::zero(),
        BiasMode::B1ConstantMean,
        Some(T::zero()),
        move |x, xi| {
            f.eval(x, xi).map_err(|e| match e {
                Error::DimensionMismatch { expected, got } => OracleError::Dimension { expected, got },
                _ => OracleError::NonFinite,
            })
        },
    )
}

/// Range of the injected pseudo-noise `u(x, ξ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseShape {
    /// `u ∈ [-1, 1]`, mean zero.
    Symmetric,
    /// `u ∈ [0, 1]`, mimicking the positive error of a truncated minimization.
    OneSided,
}

/// Deterministic pseudo-noise in `[0, 1)` keyed on the bit patterns of `x` and `ξ`.
pub fn hash_unit<T: Scalar>(x: &[T], xi: &Scenario<T>, seed: u64) -> f64 {
    let words = x
        .iter()
        .map(|v| v.to_f64_lossy().to_bits())
        .chain(std::iter::once(mix64(x.len() as u64)))
        .chain(xi.payload.iter().map(|v| v.to_f64_lossy().to_bits()));
    let h = hash_words(seed, words);
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `F̃ = F + δ̃ u(x, ξ)` with hash-based `u`.
pub fn make_noisy_oracle<T: Scalar>(
    f: Arc<dyn StochasticFunction<T>>,
    delta_bound: T,
    noise_seed: u64,
    shape: NoiseShape,
) -> Result<InexactOracle<T>> {
    if !f.has_closed_form() {
        return Err(Error::Unsupported(format!(
            "{} has no closed form to perturb",
            f.name()
        )));
    }
    let known_bias = match shape {
        NoiseShape::Symmetric => T::zero(),
        NoiseShape::OneSided => delta_bound / T::of(2.0),
    };
    let label = format!("noisy({}, {:?})", f.name(), shape);
    InexactOracle::from_fn(
        label,
        delta_bound,
        BiasMode::B1ConstantMean,
        Some(known_bias),
        move |x, xi| {
            let exact = f.eval(x, xi).map_err(|_| OracleError::Dimension {
                expected: f.dim(),
                got: x.len(),
            })?;
            let u = hash_unit(x, xi, noise_seed);
            let u = match shape {
                NoiseShape::Symmetric => 2.0 * u - 1.0,
                NoiseShape::OneSided => u,
            };
            Ok(exact + delta_bound * T::of(u))
        },
    )
}

/// Feasible set `𝒴(ξ)` of an inner problem.
#[derive(Clone, Debug, PartialEq)]
pub enum InnerSet<T> {
    Box { lo: Vec<T>, hi: Vec<T> },
    Ball { radius: T },
}

impl<T: Scalar> InnerSet<T> {
    pub fn project(&self, y: &[T]) -> Vec<T> {
        match self {
            InnerSet::Box { lo, hi } => y
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(&v, (&l, &h))| v.max(l).min(h))
                .collect(),
            InnerSet::Ball { radius } => {
                let nrm = linalg::norm(y);
                if nrm <= *radius {
                    y.to_vec()
                } else {
                    linalg::scale(*radius / nrm, y)
                }
            }
        }
    }

    /// `min_{z ∈ 𝒴} gᵀz`.
    pub fn support_min(&self, g: &[T]) -> T {
        match self {
            InnerSet::Box { lo, hi } => g.iter().zip(lo.iter().zip(hi)).fold(T::zero(), |acc, (&gi, (&l, &h))| {
                acc + if gi > T::zero() { gi * l } else { gi * h }
            }),
            InnerSet::Ball { radius } => -*radius * linalg::norm(g),
        }
    }
}

/// Whether the inner problem is minimized or maximized over `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    fn sign<T: Scalar>(self) -> T {
        match self {
            Sense::Min => T::one(),
            Sense::Max => -T::one(),
        }
    }
}

/// A parametric inner problem `F̂(x, y, ξ)` over `y ∈ 𝒴(ξ)`, smooth in `y`.
pub trait InnerProblem<T: Scalar>: Send + Sync + Debug {
    fn outer_dim(&self) -> usize;
    fn inner_dim(&self) -> usize;
    fn feasible_set(&self, xi: &Scenario<T>) -> InnerSet<T>;
    fn objective(&self, x: &[T], y: &[T], xi: &Scenario<T>) -> T;
    fn grad_y(&self, x: &[T], y: &[T], xi: &Scenario<T>) -> Vec<T>;
    /// Lipschitz constant `Λ(ξ)` of `∇_y F̂(x, ·, ξ)`.
    fn smoothness(&self, xi: &Scenario<T>) -> T;
    /// Strong convexity (for minimization) or strong concavity (for
    /// maximization) modulus in `y`; zero if none is known.
    fn curvature(&self, xi: &Scenario<T>) -> T;
}

/// Outcome of a certified inner solve.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerSolveReport<T> {
    pub iterations: usize,
    pub final_gap_bound: T,
    pub y_out: Vec<T>,
    /// `F̂(x, y_out, ξ)`.
    pub value: T,
}

/// Projected gradient on `h(y) = sign * F̂` until a certified gap `<= tol`.
///
/// Certificates at `y⁺ = P(y - ∇h(y)/Λ)`: the Frank-Wolfe gap over `𝒴`, and
/// `‖s‖²/(2σ)` for the subgradient `s = ∇h(y⁺) - ∇h(y) + Λ(y - y⁺) ∈ ∂(h + ι_𝒴)(y⁺)`
/// when `h` is `σ`-strongly convex. The smaller one is used.
#[allow(clippy::too_many_arguments)]
pub fn projected_gradient<T: Scalar>(
    set: &InnerSet<T>,
    dim: usize,
    sense: Sense,
    objective: impl Fn(&[T]) -> T,
    grad: impl Fn(&[T]) -> Vec<T>,
    smoothness: T,
    curvature: T,
    tol: T,
    budget: usize,
) -> Result<InnerSolveReport<T>, OracleError> {
    let sign: T = sense.sign();
    let h_grad = |y: &[T]| -> Vec<T> { grad(y).into_iter().map(|g| sign * g).collect() };
    let fw_gap = |y: &[T], g: &[T]| linalg::dot(g, y) - set.support_min(g);

    let mut y = set.project(&vec![T::zero(); dim]);
    let mut g = h_grad(&y);
    let mut best_gap = fw_gap(&y, &g);
    if best_gap <= tol {
        return Ok(InnerSolveReport {
            iterations: 0,
            final_gap_bound: best_gap.max(T::zero()),
            value: objective(&y),
            y_out: y,
        });
    }
    let step = T::one() / smoothness;
    for k in 1..=budget {
        let y_next = set.project(&linalg::add_scaled(&y, -step, &g));
        let g_next = h_grad(&y_next);
        let mut gap = fw_gap(&y_next, &g_next);
        if curvature > T::zero() {
            let s: Vec<T> = g_next
                .iter()
                .zip(&g)
                .zip(y.iter().zip(&y_next))
                .map(|((&gn, &go), (&yo, &yn))| gn - go + smoothness * (yo - yn))
                .collect();
            gap = gap.min(linalg::norm_sq(&s) / (T::of(2.0) * curvature));
        }
        best_gap = best_gap.min(gap);
        y = y_next;
        g = g_next;
        if gap <= tol {
            return Ok(InnerSolveReport {
                iterations: k,
                final_gap_bound: gap.max(T::zero()),
                value: objective(&y),
                y_out: y,
            });
        }
    }
    Err(OracleError::BudgetExhausted {
        budget,
        best_gap: best_gap.to_f64_lossy(),
    })
}

/// Solves `min` / `max_{y ∈ 𝒴(ξ)} F̂(x, y, ξ)` to a certified gap of `tol`.
pub fn solve_inner<T: Scalar, P: InnerProblem<T> + ?Sized>(
    problem: &P,
    sense: Sense,
    x: &[T],
    xi: &Scenario<T>,
    tol: T,
    budget: usize,
) -> Result<InnerSolveReport<T>, OracleError> {
    if x.len() != problem.outer_dim() {
        return Err(OracleError::Dimension {
            expected: problem.outer_dim(),
            got: x.len(),
        });
    }
    projected_gradient(
        &problem.feasible_set(xi),
        problem.inner_dim(),
        sense,
        |y| problem.objective(x, y, xi),
        |y| problem.grad_y(x, y, xi),
        problem.smoothness(xi),
        problem.curvature(xi),
        tol,
        budget,
    )
}

fn check_tol<T: Scalar>(tol: T) -> Result<()> {
    if tol > T::zero() && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Input(format!("inner tolerance must be > 0, got {tol}")))
    }
}

/// Oracle for `F(x, ξ) = min_y F̂(x, y, ξ)`; error in `[0, tol]`.
pub fn make_inner_min_oracle<T: Scalar>(
    problem: Arc<dyn InnerProblem<T>>,
    tol: T,
    budget: usize,
) -> Result<InexactOracle<T>> {
    check_tol(tol)?;
    InexactOracle::from_fn("inner_min", tol, BiasMode::B2BoundedOnly, None, move |x, xi| {
        solve_inner(problem.as_ref(), Sense::Min, x, xi, tol, budget).map(|r| r.value)
    })
}

/// Oracle for `F(x, ξ) = max_y F̂(x, y, ξ)`; error in `[-tol, 0]`.
pub fn make_inner_max_oracle<T: Scalar>(
    problem: Arc<dyn InnerProblem<T>>,
    tol: T,
    budget: usize,
) -> Result<InexactOracle<T>> {
    check_tol(tol)?;
    InexactOracle::from_fn("inner_max", tol, BiasMode::B2BoundedOnly, None, move |x, xi| {
        solve_inner(problem.as_ref(), Sense::Max, x, xi, tol, budget).map(|r| r.value)
    })
}

/// Selection `ŷ(x)` maximizing a fixed-sample average of `F̂(x, ·, ξ_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ErgodicSelection<T> {
    pub y_hat: Vec<T>,
    pub report: InnerSolveReport<T>,
    /// Standard error of the sample-average gradient `∇_y` at `ŷ`; a proxy for
    /// the sample-average bias, which has no a-priori bound.
    pub saa_std_error: T,
}

/// Oracle for `F(x, ξ) = F̂(x, y*(x), ξ)` with `y*(x)` maximizing `E_ξ{F̂(x, ·, ξ)}`.
#[derive(Clone, Debug)]
pub struct ErgodicMaxOracle<T: Scalar> {
    problem: Arc<dyn InnerProblem<T>>,
    samples: Arc<Vec<Scenario<T>>>,
    tol: T,
    budget: usize,
}

impl<T: Scalar> ErgodicMaxOracle<T> {
    pub fn new(problem: Arc<dyn InnerProblem<T>>, samples: Vec<Scenario<T>>, tol: T, budget: usize) -> Result<Self> {
        check_tol(tol)?;
        if samples.is_empty() {
            return Err(Error::Input("ergodic oracle needs at least one sample".into()));
        }
        let set = problem.feasible_set(&samples[0]);
        if samples.iter().any(|s| problem.feasible_set(s) != set) {
            return Err(Error::Unsupported(
                "ergodic inner problems need a scenario-independent feasible set".into(),
            ));
        }
        Ok(ErgodicMaxOracle {
            problem,
            samples: Arc::new(samples),
            tol,
            budget,
        })
    }

    pub fn num_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn select(&self, x: &[T]) -> Result<ErgodicSelection<T>, OracleError> {
        let p = self.problem.as_ref();
        if x.len() != p.outer_dim() {
            return Err(OracleError::Dimension {
                expected: p.outer_dim(),
                got: x.len(),
            });
        }
        let k = T::of_usize(self.samples.len());
        let m = p.inner_dim();
        let avg_grad = |y: &[T]| -> Vec<T> {
            let mut acc = vec![T::zero(); m];
            for s in self.samples.iter() {
                for (a, g) in acc.iter_mut().zip(p.grad_y(x, y, s)) {
                    *a = *a + g;
                }
            }
            linalg::scale(T::one() / k, &acc)
        };
        let avg_obj = |y: &[T]| -> T { self.samples.iter().map(|s| p.objective(x, y, s)).sum::<T>() / k };
        let smooth = self.samples.iter().map(|s| p.smoothness(s)).sum::<T>() / k;
        let curv = self.samples.iter().map(|s| p.curvature(s)).sum::<T>() / k;
        let report = projected_gradient(
            &p.feasible_set(&self.samples[0]),
            m,
            Sense::Max,
            avg_obj,
            avg_grad,
            smooth,
            curv,
            self.tol,
            self.budget,
        )?;
        let saa_std_error = if self.samples.len() > 1 {
            let grads: Vec<Vec<T>> = self.samples.iter().map(|s| p.grad_y(x, &report.y_out, s)).collect();
            let mean = linalg::scale(
                T::one() / k,
                &grads.iter().fold(vec![T::zero(); m], |a, g| linalg::add(&a, g)),
            );
            let ss: T = grads.iter().map(|g| linalg::norm_sq(&linalg::sub(g, &mean))).sum();
            (ss / (k * (k - T::one()))).sqrt()
        } else {
            T::zero()
        };
        Ok(ErgodicSelection {
            y_hat: report.y_out.clone(),
            report,
            saa_std_error,
        })
    }

    /// `F̂(x, ŷ(x), ξ)`.
    pub fn eval(&self, x: &[T], xi: &Scenario<T>) -> Result<T, OracleError> {
        let sel = self.select(x)?;
        Ok(self.problem.objective(x, &sel.y_hat, xi))
    }

    pub fn into_oracle(self) -> Result<InexactOracle<T>> {
        let tol = self.tol;
        InexactOracle::from_fn("ergodic_max", tol, BiasMode::B2BoundedOnly, None, move |x, xi| {
            self.eval(x, xi)
        })
    }
}

/// Builds the ergodic oracle from `K` fixed samples.
pub fn make_ergodic_max_oracle<T: Scalar>(
    problem: Arc<dyn InnerProblem<T>>,
    samples: Vec<Scenario<T>>,
    tol: T,
    budget: usize,
) -> Result<InexactOracle<T>> {
    ErgodicMaxOracle::new(problem, samples, tol, budget)?.into_oracle()
}
