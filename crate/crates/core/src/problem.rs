//! Composite stochastic problems `min_x E{F(x, ξ)} + r(x)`.

use std::fmt::Debug;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::rng::StreamKey;
use crate::Scalar;

/// One realization of the random vector ξ.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario<T> {
    pub payload: Vec<T>,
}

impl<T: Scalar> Scenario<T> {
    pub fn new(payload: Vec<T>) -> Self {
        Scenario { payload }
    }

    pub fn dim(&self) -> usize {
        self.payload.len()
    }
}

/// Distribution of ξ. Coordinates are independent for every law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioLaw {
    /// Every draw equals the stored point.
    PointMass(Vec<f64>),
    /// Uniform on `[-1, 1]^d`.
    UniformCube,
    /// Uniform on `{-1, +1}^d`.
    Rademacher,
}

impl ScenarioLaw {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioLaw::PointMass(_) => "point_mass",
            ScenarioLaw::UniformCube => "uniform_cube",
            ScenarioLaw::Rademacher => "rademacher",
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            ScenarioLaw::PointMass(p) if p.len() != d => Err(Error::DimensionMismatch {
                expected: d,
                got: p.len(),
            }),
            ScenarioLaw::PointMass(p) if p.iter().any(|v| !v.is_finite()) => {
                Err(Error::Input("point-mass scenario must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Vec<f64> {
        match self {
            ScenarioLaw::PointMass(p) => p.clone(),
            ScenarioLaw::UniformCube => (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect(),
            ScenarioLaw::Rademacher => (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect(),
        }
    }

    /// `E{ξ_k}`.
    pub fn mean(&self, k: usize) -> f64 {
        match self {
            ScenarioLaw::PointMass(p) => p[k],
            _ => 0.0,
        }
    }

    /// `E{ξ_k ξ_l}`.
    pub fn cross_moment(&self, k: usize, l: usize) -> f64 {
        match self {
            ScenarioLaw::PointMass(p) => p[k] * p[l],
            ScenarioLaw::UniformCube if k == l => 1.0 / 3.0,
            ScenarioLaw::Rademacher if k == l => 1.0,
            _ => 0.0,
        }
    }

    /// `sup |ξ_k|` over the support.
    pub fn sup_abs(&self, k: usize) -> f64 {
        match self {
            ScenarioLaw::PointMass(p) => p[k].abs(),
            _ => 1.0,
        }
    }
}

/// Replayable i.i.d. scenario source; draw `k` depends only on `(key, k)`.
#[derive(Clone, Debug)]
pub struct ScenarioStream {
    key: StreamKey,
    law: ScenarioLaw,
    dim: usize,
    counter: u64,
}

impl ScenarioStream {
    pub fn new(key: StreamKey, law: ScenarioLaw, dim: usize) -> Self {
        ScenarioStream {
            key,
            law,
            dim,
            counter: 0,
        }
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// The draw at a given position, without touching the counter.
    pub fn draw<T: Scalar>(&self, index: u64) -> Scenario<T> {
        let raw = self.law.sample(self.dim, &mut self.key.rng(index));
        Scenario::new(raw.into_iter().map(T::of).collect())
    }

    pub fn sample_scenario<T: Scalar>(&mut self) -> Scenario<T> {
        let s = self.draw(self.counter);
        self.counter += 1;
        s
    }
}

/// The sampled function `F(x, ξ)` of the composite problem.
pub trait StochasticFunction<T: Scalar>: Send + Sync + Debug {
    fn name(&self) -> &str;

    /// Dimension `n` of the decision variable.
    fn dim(&self) -> usize;

    /// `G` with `E{L(ξ)^2} <= G^2`.
    fn lipschitz_bound(&self) -> T;

    /// Whether [`StochasticFunction::eval`] is available.
    fn has_closed_form(&self) -> bool {
        true
    }

    /// `F(x, ξ)` in closed form. Functions defined through an inner
    /// optimization return [`Error::Unsupported`].
    fn eval(&self, x: &[T], xi: &Scenario<T>) -> Result<T>;
}

type EvalFn<T> = dyn Fn(&[T], &Scenario<T>) -> T + Send + Sync;

/// A closure-backed [`StochasticFunction`].
#[derive(Clone)]
pub struct ClosureFunction<T> {
    name: String,
    dim: usize,
    lipschitz: T,
    eval: Arc<EvalFn<T>>,
}

impl<T: Scalar> ClosureFunction<T> {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        lipschitz: T,
        eval: impl Fn(&[T], &Scenario<T>) -> T + Send + Sync + 'static,
    ) -> Self {
        ClosureFunction {
            name: name.into(),
            dim,
            lipschitz,
            eval: Arc::new(eval),
        }
    }

    /// `F(x, ξ) = aᵀx`.
    pub fn linear(a: Vec<T>) -> Self {
        let g = linalg::norm(&a);
        let n = a.len();
        Self::new("linear", n, g, move |x, _| linalg::dot(&a, x))
    }

    /// `F(x, ξ) = ½‖x‖²`; Lipschitz only on bounded sets, `lipschitz` is the caller's bound.
    pub fn half_square(n: usize, lipschitz: T) -> Self {
        Self::new("half_square", n, lipschitz, |x, _| T::of(0.5) * linalg::norm_sq(x))
    }

    pub fn constant(n: usize, value: T) -> Self {
        Self::new("constant", n, T::zero(), move |_, _| value)
    }

    /// `F(x, ξ) = ‖x‖`.
    pub fn norm(n: usize) -> Self {
        Self::new("norm", n, T::one(), |x, _| linalg::norm(x))
    }
}

impl<T: Scalar> Debug for ClosureFunction<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClosureFunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl<T: Scalar> StochasticFunction<T> for ClosureFunction<T> {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn lipschitz_bound(&self) -> T {
        self.lipschitz
    }
    fn eval(&self, x: &[T], xi: &Scenario<T>) -> Result<T> {
        check_dim(self.dim, x.len())?;
        Ok((self.eval)(x, xi))
    }
}

/// Proper closed convex regularizer with a closed-form prox.
#[derive(Clone, Debug, PartialEq)]
pub enum Regularizer<T> {
    Zero,
    L1 { weight: T },
    BoxIndicator { lo: Vec<T>, hi: Vec<T> },
    L2BallIndicator { radius: T },
    L1PlusBox { weight: T, lo: Vec<T>, hi: Vec<T> },
}

impl<T: Scalar> Regularizer<T> {
    pub fn l1(weight: T) -> Result<Self> {
        if !(weight >= T::zero()) || !weight.is_finite() {
            return Err(Error::Input(format!("l1 weight must be >= 0, got {weight}")));
        }
        Ok(Regularizer::L1 { weight })
    }

    pub fn boxed(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        check_box(&lo, &hi)?;
        Ok(Regularizer::BoxIndicator { lo, hi })
    }

    /// `[lo, hi]^n`.
    pub fn uniform_box(n: usize, lo: T, hi: T) -> Result<Self> {
        Self::boxed(vec![lo; n], vec![hi; n])
    }

    pub fn l2_ball(radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::Input(format!("ball radius must be > 0, got {radius}")));
        }
        Ok(Regularizer::L2BallIndicator { radius })
    }

    pub fn l1_plus_box(weight: T, lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if !(weight >= T::zero()) || !weight.is_finite() {
            return Err(Error::Input(format!("l1 weight must be >= 0, got {weight}")));
        }
        check_box(&lo, &hi)?;
        Ok(Regularizer::L1PlusBox { weight, lo, hi })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Regularizer::Zero => "zero",
            Regularizer::L1 { .. } => "l1",
            Regularizer::BoxIndicator { .. } => "box",
            Regularizer::L2BallIndicator { .. } => "l2ball",
            Regularizer::L1PlusBox { .. } => "l1_plus_box",
        }
    }

    /// Dimension the regularizer is tied to, if any.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            Regularizer::BoxIndicator { lo, .. } | Regularizer::L1PlusBox { lo, .. } => Some(lo.len()),
            _ => None,
        }
    }

    pub fn box_bounds(&self) -> Option<(&[T], &[T])> {
        match self {
            Regularizer::BoxIndicator { lo, hi } | Regularizer::L1PlusBox { lo, hi, .. } => Some((lo, hi)),
            _ => None,
        }
    }

    /// Diameter `D` of `dom r`, finite iff the domain is bounded.
    pub fn diameter(&self) -> Option<T> {
        match self {
            Regularizer::Zero | Regularizer::L1 { .. } => None,
            Regularizer::BoxIndicator { lo, hi } | Regularizer::L1PlusBox { lo, hi, .. } => Some(linalg::dist(lo, hi)),
            Regularizer::L2BallIndicator { radius } => Some(T::of(2.0) * *radius),
        }
    }

    pub fn contains(&self, x: &[T]) -> bool {
        if !linalg::is_finite(x) {
            return false;
        }
        match self {
            Regularizer::Zero | Regularizer::L1 { .. } => true,
            Regularizer::BoxIndicator { lo, hi } | Regularizer::L1PlusBox { lo, hi, .. } => {
                x.iter().zip(lo.iter().zip(hi)).all(|(&v, (&l, &h))| v >= l && v <= h)
            }
            Regularizer::L2BallIndicator { radius } => linalg::norm(x) <= *radius,
        }
    }

    /// `r(x)`, `+inf` outside the domain.
    pub fn value(&self, x: &[T]) -> T {
        if !self.contains(x) {
            return T::infinity();
        }
        match self {
            Regularizer::L1 { weight } | Regularizer::L1PlusBox { weight, .. } => *weight * linalg::norm_l1(x),
            _ => T::zero(),
        }
    }
}

fn check_box<T: Scalar>(lo: &[T], hi: &[T]) -> Result<()> {
    check_dim(lo.len(), hi.len())?;
    for (i, (&l, &h)) in lo.iter().zip(hi).enumerate() {
        if !(l <= h) || !l.is_finite() || !h.is_finite() {
            return Err(Error::Input(format!(
                "box bounds must satisfy lo <= hi, violated at coordinate {i} ({l} > {h})"
            )));
        }
    }
    Ok(())
}

/// `φ(x) = E{F(x, ξ)} + r(x)`.
#[derive(Clone, Debug)]
pub struct CompositeProblem<T: Scalar> {
    pub f: Arc<dyn StochasticFunction<T>>,
    pub r: Regularizer<T>,
    pub scenario_dim: usize,
    pub law: ScenarioLaw,
}

impl<T: Scalar> CompositeProblem<T> {
    pub fn new(
        f: Arc<dyn StochasticFunction<T>>,
        r: Regularizer<T>,
        scenario_dim: usize,
        law: ScenarioLaw,
    ) -> Result<Self> {
        if f.dim() == 0 {
            return Err(Error::Config("problem dimension must be positive".into()));
        }
        if scenario_dim == 0 {
            return Err(Error::Config("scenario dimension must be positive".into()));
        }
        if let Some(d) = r.fixed_dim() {
            check_dim(f.dim(), d)?;
        }
        law.validate(scenario_dim)?;
        Ok(CompositeProblem {
            f,
            r,
            scenario_dim,
            law,
        })
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn lipschitz_bound(&self) -> T {
        self.f.lipschitz_bound()
    }

    /// Whether `x ∈ dom r`.
    pub fn validate_point(&self, x: &[T]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.r.contains(x))
    }

    /// The true `F(x, ξ)` for instances with a closed form.
    pub fn evaluate_exact(&self, x: &[T], xi: &Scenario<T>) -> Result<T> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.scenario_dim, xi.dim())?;
        self.f.eval(x, xi)
    }

    pub fn scenario_stream(&self, key: StreamKey) -> ScenarioStream {
        ScenarioStream::new(key, self.law.clone(), self.scenario_dim)
    }
}
