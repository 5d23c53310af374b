//! The instance zoo: declarative specs, problem construction, oracle wiring
//! and brute-force reference solutions.

pub mod affine;
pub mod reference;
pub mod zoo;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::{
    make_ergodic_max_oracle, make_exact_oracle, make_inner_max_oracle, make_inner_min_oracle, make_noisy_oracle,
    solve_inner, InexactOracle, InnerProblem, NoiseShape, Sense,
};
use crate::problem::{CompositeProblem, Regularizer, Scenario, ScenarioLaw, StochasticFunction};
use crate::rng::StreamKey;
use crate::Scalar;

pub use affine::AffineMatrix;
pub use reference::{reference_solution, saa_scenarios, ReferenceMethod, ReferenceSolution};
pub use zoo::{CuspBox, L1MinusL2, MaxAffine, Minimax, NormSharp, TwoStageQp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemName {
    NormSharp,
    L1MinusL2,
    CuspBox,
    MaxAffine,
    TwoStageQp,
    MmInstant,
    MmErgodic,
}

impl ProblemName {
    pub const ALL: [ProblemName; 7] = [
        ProblemName::NormSharp,
        ProblemName::L1MinusL2,
        ProblemName::CuspBox,
        ProblemName::MaxAffine,
        ProblemName::TwoStageQp,
        ProblemName::MmInstant,
        ProblemName::MmErgodic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemName::NormSharp => "norm_sharp",
            ProblemName::L1MinusL2 => "l1_minus_l2",
            ProblemName::CuspBox => "cusp_box",
            ProblemName::MaxAffine => "max_affine",
            ProblemName::TwoStageQp => "two_stage_qp",
            ProblemName::MmInstant => "mm_instant",
            ProblemName::MmErgodic => "mm_ergodic",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ProblemName::NormSharp => "F = ||x||, sharp minimum at the origin",
            ProblemName::L1MinusL2 => "F = ||x||_1 - ||x||_2, nonconvex, zero on the axes",
            ProblemName::CuspBox => "F = (1 - max{x_1, 0})^2 on a box",
            ProblemName::MaxAffine => "F = max_i a_i(xi)'x + b_i(xi)",
            ProblemName::TwoStageQp => "F = min over y in [-1,1]^m of a convex QP recourse",
            ProblemName::MmInstant => "F = max over ||y|| <= R of (A(xi)x)'y - ||y||^2/2",
            ProblemName::MmErgodic => "F = (A(xi)x)'y* - ||y*||^2/2, y* maximizing the mean objective",
        }
    }

    /// Whether `F` ignores the scenario.
    pub fn is_deterministic(self) -> bool {
        matches!(
            self,
            ProblemName::NormSharp | ProblemName::L1MinusL2 | ProblemName::CuspBox
        )
    }

    pub fn default_regularizer(self) -> RegularizerSpec {
        match self {
            ProblemName::NormSharp => RegularizerSpec::Zero,
            ProblemName::CuspBox => RegularizerSpec::Box { lo: -2.0, hi: 2.0 },
            _ => RegularizerSpec::Box { lo: -1.0, hi: 1.0 },
        }
    }
}

impl fmt::Display for ProblemName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ProblemName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown problem '{s}'")))
    }
}

/// Regularizer with scalar bounds broadcast to every coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RegularizerSpec {
    Zero,
    L1 { weight: f64 },
    Box { lo: f64, hi: f64 },
    L2Ball { radius: f64 },
    L1PlusBox { weight: f64, lo: f64, hi: f64 },
}

impl RegularizerSpec {
    pub fn build<T: Scalar>(&self, n: usize) -> Result<Regularizer<T>> {
        match *self {
            RegularizerSpec::Zero => Ok(Regularizer::Zero),
            RegularizerSpec::L1 { weight } => Regularizer::l1(T::of(weight)),
            RegularizerSpec::Box { lo, hi } => Regularizer::uniform_box(n, T::of(lo), T::of(hi)),
            RegularizerSpec::L2Ball { radius } => Regularizer::l2_ball(T::of(radius)),
            RegularizerSpec::L1PlusBox { weight, lo, hi } => {
                Regularizer::l1_plus_box(T::of(weight), vec![T::of(lo); n], vec![T::of(hi); n])
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            RegularizerSpec::Zero => "zero",
            RegularizerSpec::L1 { .. } => "l1",
            RegularizerSpec::Box { .. } => "box",
            RegularizerSpec::L2Ball { .. } => "l2ball",
            RegularizerSpec::L1PlusBox { .. } => "l1_plus_box",
        }
    }

    /// `sup ‖x‖` over the domain, if bounded.
    pub fn domain_radius(&self, n: usize) -> Option<f64> {
        match *self {
            RegularizerSpec::Box { lo, hi } | RegularizerSpec::L1PlusBox { lo, hi, .. } => {
                Some((n as f64).sqrt() * lo.abs().max(hi.abs()))
            }
            RegularizerSpec::L2Ball { radius } => Some(radius),
            _ => None,
        }
    }
}

/// Declarative description of a zoo instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub name: ProblemName,
    pub n: usize,
    /// Inner dimension, or number of pieces for `max_affine`.
    pub m: usize,
    /// Scenario dimension.
    pub d: usize,
    pub data_seed: u64,
    pub regularizer: RegularizerSpec,
    pub scenario_law: ScenarioLaw,
    /// Inner ball radius `R` of the minimax instances.
    pub radius: f64,
    /// Diagonal shift of `Q(ξ)` in `two_stage_qp`.
    pub q_shift: f64,
    /// Weight of the `‖x‖₁ - ‖x‖` outer term in `two_stage_qp`.
    pub outer_weight: f64,
    /// Entry scale of the scenario perturbation terms.
    pub noise_scale: f64,
}

impl ProblemSpec {
    pub fn new(name: ProblemName, n: usize) -> Self {
        ProblemSpec {
            name,
            n,
            m: 2,
            d: 2,
            data_seed: 0,
            regularizer: name.default_regularizer(),
            scenario_law: ScenarioLaw::UniformCube,
            radius: 1.0,
            q_shift: 0.1,
            outer_weight: 0.0,
            noise_scale: 0.3,
        }
    }

    /// Every violated constraint, each prefixed with its field name.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.n == 0 {
            v.push("n: must be >= 1".to_string());
        }
        if self.m == 0 {
            v.push("m: must be >= 1".to_string());
        }
        if self.d == 0 {
            v.push("d: must be >= 1".to_string());
        }
        if let Err(e) = self.scenario_law.validate(self.d) {
            v.push(format!("law: {e}"));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            v.push(format!("radius: must be > 0, got {}", self.radius));
        }
        if !(self.q_shift > 0.0 && self.q_shift.is_finite()) {
            v.push(format!("q_shift: must be > 0, got {}", self.q_shift));
        }
        if !(self.outer_weight >= 0.0 && self.outer_weight.is_finite()) {
            v.push(format!("outer_weight: must be >= 0, got {}", self.outer_weight));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            v.push(format!("noise_scale: must be >= 0, got {}", self.noise_scale));
        }
        if self.n > 0 {
            if let Err(e) = self.regularizer.build::<f64>(self.n) {
                v.push(format!("regularizer: {e}"));
            }
        }
        match (self.name, &self.regularizer) {
            (ProblemName::CuspBox, RegularizerSpec::Box { .. } | RegularizerSpec::L1PlusBox { .. }) => {}
            (ProblemName::CuspBox, _) => v.push("regularizer: cusp_box needs a box domain to be Lipschitz".to_string()),
            (ProblemName::MmErgodic, r) if r.domain_radius(self.n).is_none() => {
                v.push("regularizer: mm_ergodic needs a bounded domain".to_string())
            }
            _ => {}
        }
        v
    }

    fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v.join("; ")))
        }
    }

    /// Root of the instance data; both minimax variants share one family so
    /// they see the same coupling matrices.
    pub fn data_key(&self) -> StreamKey {
        let family = match self.name {
            ProblemName::MmInstant | ProblemName::MmErgodic => "minimax",
            other => other.as_str(),
        };
        StreamKey::root(self.data_seed).child(family)
    }
}

/// Handle to the inner problem behind an instance, with its sense.
#[derive(Clone, Debug)]
pub enum InnerHandle<T: Scalar> {
    Min(Arc<dyn InnerProblem<T>>),
    Max(Arc<dyn InnerProblem<T>>),
    /// Maximization over the expected objective.
    ErgodicMax(Arc<dyn InnerProblem<T>>),
}

/// A built zoo instance.
#[derive(Clone, Debug)]
pub struct Instance<T: Scalar> {
    pub spec: ProblemSpec,
    pub problem: CompositeProblem<T>,
    pub inner: Option<InnerHandle<T>>,
}

/// Tolerance of the high-accuracy inner solves used for ground truth.
pub const REFERENCE_INNER_TOL: f64 = 1e-10;
const REFERENCE_INNER_BUDGET: usize = 1_000_000;

impl<T: Scalar> Instance<T> {
    /// `F(x, ξ)`: closed form, or a certified inner solve to `1e-10`.
    pub fn true_value(&self, x: &[T], xi: &Scenario<T>) -> Result<T> {
        if self.problem.f.has_closed_form() {
            return self.problem.evaluate_exact(x, xi);
        }
        match &self.inner {
            Some(InnerHandle::Min(p)) => {
                let tol = T::of(REFERENCE_INNER_TOL).max(T::epsilon());
                Ok(solve_inner(p.as_ref(), Sense::Min, x, xi, tol, REFERENCE_INNER_BUDGET)?.value)
            }
            _ => Err(Error::Unsupported(format!("no ground truth for {}", self.spec.name))),
        }
    }

    /// `(1/K) Σ_k F(x, ξ_k) + r(x)`.
    pub fn saa_objective(&self, scenarios: &[Scenario<T>], x: &[T]) -> Result<T> {
        if scenarios.is_empty() {
            return Err(Error::Input("SAA objective needs at least one scenario".into()));
        }
        let mut acc = T::zero();
        for s in scenarios {
            acc = acc + self.true_value(x, s)?;
        }
        Ok(acc / T::of_usize(scenarios.len()) + self.problem.r.value(x))
    }

    pub fn lipschitz_bound(&self) -> T {
        self.problem.lipschitz_bound()
    }
}

pub fn build_instance<T: Scalar>(spec: &ProblemSpec) -> Result<Instance<T>> {
    spec.validate()?;
    let n = spec.n;
    let m = spec.m;
    let d = spec.d;
    let r = spec.regularizer.build::<T>(n)?;
    let law = &spec.scenario_law;
    let key = spec.data_key();
    let ns = spec.noise_scale;
    let affine = |tag: &str, rows: usize, cols: usize, base: f64| {
        AffineMatrix::<T>::random(key.child(tag), rows, cols, d, base, ns)
    };
    let (f, inner): (Arc<dyn StochasticFunction<T>>, Option<InnerHandle<T>>) = match spec.name {
        ProblemName::NormSharp => (Arc::new(NormSharp { n }), None),
        ProblemName::L1MinusL2 => (Arc::new(L1MinusL2 { n }), None),
        ProblemName::CuspBox => {
            let hi1 = r
                .box_bounds()
                .map(|(_, hi)| hi[0].to_f64_lossy())
                .unwrap_or(f64::INFINITY);
            (Arc::new(CuspBox { n, hi1 }), None)
        }
        ProblemName::MaxAffine => {
            let a = affine("a", m, n, 1.0);
            let b = affine("b", m, 1, 0.5);
            let lipschitz = (0..m).map(|i| a.row_norm_sup(law, i)).fold(T::zero(), T::max);
            (Arc::new(MaxAffine { a, b, lipschitz }), None)
        }
        ProblemName::TwoStageQp => {
            let a = affine("a", m, n, 1.0);
            let c = affine("c", n, 1, 0.5);
            let danskin =
                T::of_usize(m).sqrt() * a.frobenius_second_moment(law).sqrt() + c.frobenius_second_moment(law).sqrt();
            let outer = T::of(spec.outer_weight) * (T::of_usize(n).sqrt() + T::one());
            let qp = Arc::new(TwoStageQp {
                b: affine("b", m, 1, 0.5),
                mfac: affine("m", m, m, 1.0),
                a,
                c,
                shift: T::of(spec.q_shift),
                outer_weight: T::of(spec.outer_weight),
                lipschitz: danskin + outer,
            });
            (qp.clone(), Some(InnerHandle::Min(qp)))
        }
        ProblemName::MmInstant | ProblemName::MmErgodic => {
            let ergodic = spec.name == ProblemName::MmErgodic;
            let a = affine("a", m, n, 1.0);
            let a_mean = a.mean(law);
            let rad = T::of(spec.radius);
            let ea = a.frobenius_second_moment(law).sqrt();
            let lipschitz = if ergodic {
                let x_max = T::of(spec.regularizer.domain_radius(n).expect("validated"));
                rad * ea + crate::linalg::norm(&a_mean) * (x_max * ea + rad)
            } else {
                rad * ea
            };
            let mm = Arc::new(Minimax {
                a,
                a_mean,
                radius: rad,
                ergodic,
                lipschitz,
            });
            let handle = if ergodic {
                InnerHandle::ErgodicMax(mm.clone() as Arc<dyn InnerProblem<T>>)
            } else {
                InnerHandle::Max(mm.clone() as Arc<dyn InnerProblem<T>>)
            };
            (mm, Some(handle))
        }
    };
    let problem = CompositeProblem::new(f, r, d, law.clone())?;
    Ok(Instance {
        spec: spec.clone(),
        problem,
        inner,
    })
}

pub fn build_problem<T: Scalar>(spec: &ProblemSpec) -> Result<CompositeProblem<T>> {
    Ok(build_instance(spec)?.problem)
}

/// The declared `G` of an instance.
pub fn lipschitz_constant(spec: &ProblemSpec) -> Result<f64> {
    Ok(build_instance::<f64>(spec)?.lipschitz_bound())
}

/// Which oracle family to attach to an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Exact,
    Noisy,
    /// Truncated inner solver matching the instance's inner problem.
    Inner,
}

impl FromStr for OracleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(OracleKind::Exact),
            "noisy" => Ok(OracleKind::Noisy),
            "inner" => Ok(OracleKind::Inner),
            _ => Err(Error::Config(format!("unknown oracle kind '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSpec {
    pub kind: OracleKind,
    /// `δ̃` of the noisy oracle.
    pub delta: f64,
    pub noise_seed: u64,
    pub noise_shape: NoiseShape,
    /// Inner-solver tolerance, also its `δ̃`.
    pub tol: f64,
    pub budget: usize,
    /// Fixed sample size `K` of the ergodic oracle.
    pub samples: usize,
    /// Seed of the ergodic oracle's fixed sample.
    pub sample_seed: u64,
}

impl OracleSpec {
    pub fn exact() -> Self {
        OracleSpec {
            kind: OracleKind::Exact,
            delta: 0.0,
            noise_seed: 0,
            noise_shape: NoiseShape::Symmetric,
            tol: 1e-6,
            budget: 10_000,
            samples: 64,
            sample_seed: 0,
        }
    }

    pub fn noisy(delta: f64, noise_seed: u64) -> Self {
        OracleSpec {
            kind: OracleKind::Noisy,
            delta,
            noise_seed,
            ..OracleSpec::exact()
        }
    }

    pub fn inner(tol: f64, budget: usize) -> Self {
        OracleSpec {
            kind: OracleKind::Inner,
            tol,
            budget,
            ..OracleSpec::exact()
        }
    }

    /// Exact for closed-form instances, inner otherwise.
    pub fn default_for(name: ProblemName) -> Self {
        match name {
            ProblemName::TwoStageQp => OracleSpec::inner(1e-6, 10_000),
            _ => OracleSpec::exact(),
        }
    }
}

pub fn build_oracle<T: Scalar>(instance: &Instance<T>, spec: &OracleSpec) -> Result<InexactOracle<T>> {
    let f = instance.problem.f.clone();
    match spec.kind {
        OracleKind::Exact => make_exact_oracle(f),
        OracleKind::Noisy => make_noisy_oracle(f, T::of(spec.delta), spec.noise_seed, spec.noise_shape),
        OracleKind::Inner => {
            let tol = T::of(spec.tol);
            match &instance.inner {
                Some(InnerHandle::Min(p)) => make_inner_min_oracle(p.clone(), tol, spec.budget),
                Some(InnerHandle::Max(p)) => make_inner_max_oracle(p.clone(), tol, spec.budget),
                Some(InnerHandle::ErgodicMax(p)) => {
                    if spec.samples == 0 {
                        return Err(Error::Config("ergodic oracle needs samples >= 1".into()));
                    }
                    let stream = instance
                        .problem
                        .scenario_stream(StreamKey::root(spec.sample_seed).child("ergodic"));
                    let samples = (0..spec.samples as u64).map(|i| stream.draw(i)).collect();
                    make_ergodic_max_oracle(p.clone(), samples, tol, spec.budget)
                }
                None => Err(Error::Unsupported(format!(
                    "{} has no inner problem",
                    instance.spec.name
                ))),
            }
        }
    }
}
