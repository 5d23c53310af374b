//! Flat `dotted.key = value` experiment configuration.
//!
//! One assignment per line; `#` starts a comment. Every problem found while
//! parsing or validating is reported, each prefixed with its key path.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::oracles::NoiseShape;
use crate::problem::ScenarioLaw;
use crate::problems::{build_instance, OracleKind, OracleSpec, ProblemName, ProblemSpec, RegularizerSpec};
use crate::solver::{StepMode, DEFAULT_ITERATE_CAP};

/// All keys the parser accepts.
pub const KNOWN_KEYS: &[&str] = &[
    "problem.name",
    "problem.n",
    "problem.m",
    "problem.d",
    "problem.data_seed",
    "problem.law",
    "problem.law.point",
    "problem.radius",
    "problem.q_shift",
    "problem.outer_weight",
    "problem.noise_scale",
    "problem.regularizer.kind",
    "problem.regularizer.weight",
    "problem.regularizer.lo",
    "problem.regularizer.hi",
    "problem.regularizer.radius",
    "oracle.kind",
    "oracle.delta",
    "oracle.noise_seed",
    "oracle.noise_shape",
    "oracle.tol",
    "oracle.budget",
    "oracle.samples",
    "oracle.sample_seed",
    "solver.mu",
    "solver.T",
    "solver.step_mode",
    "solver.step",
    "solver.steps",
    "solver.phi_upper",
    "solver.c",
    "solver.rho_bar_factor",
    "solver.seed",
    "solver.x0",
    "solver.iterate_cap",
    "certify.enabled",
    "certify.epsilon",
    "certify.lambda",
    "certify.rho",
    "certify.iters",
    "certify.batch",
    "certify.step",
    "certify.cadence",
    "certify.seed",
    "reference.scenarios",
    "sweep.seeds",
    "sweep.T_values",
    "output_dir",
];

/// `Φ` as given, or estimated from the problem at run time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhiUpper {
    Value(f64),
    Auto,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverSettings {
    pub mu: f64,
    pub horizon: usize,
    pub step_mode: StepMode<f64>,
    pub phi_upper: PhiUpper,
    pub c_const: f64,
    pub rho_bar_factor: f64,
    pub seed: u64,
    pub x0: Vec<f64>,
    pub iterate_cap: usize,
}

/// Which iterates of a run get certified.
#[derive(Clone, Debug, PartialEq)]
pub enum Cadence {
    /// `t ∈ {0, T/4, T/2, 3T/4, T}` plus `t*`.
    Quartiles,
    /// Only `t*`.
    TStar,
    /// Explicit indices plus `t*`.
    List(Vec<usize>),
}

impl Cadence {
    pub fn indices(&self, horizon: usize) -> Vec<usize> {
        let mut v = match self {
            Cadence::Quartiles => (0..=4).map(|k| k * horizon / 4).collect(),
            Cadence::TStar => Vec::new(),
            Cadence::List(l) => l.iter().copied().filter(|&t| t <= horizon).collect(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifySettings {
    pub enabled: bool,
    pub epsilon: f64,
    pub lambda: Option<f64>,
    pub rho: Option<f64>,
    pub iters: usize,
    pub batch: usize,
    pub step: Option<f64>,
    pub cadence: Cadence,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub seeds: Vec<u64>,
    pub t_values: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub oracle: OracleSpec,
    pub solver: SolverSettings,
    pub certify: CertifySettings,
    pub reference_scenarios: usize,
    pub sweep: Sweep,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// `(seed, T)` pairs of the sweep, seeds outermost.
    pub fn runs(&self) -> Vec<(u64, usize)> {
        self.sweep
            .seeds
            .iter()
            .flat_map(|&s| self.sweep.t_values.iter().map(move |&t| (s, t)))
            .collect()
    }
}

/// Every violation found in a config text.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

impl ConfigErrors {
    pub fn mentions(&self, key: &str) -> bool {
        self.0.iter().any(|e| e.starts_with(key))
    }
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
    errors: Vec<String>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(_, v)| v.as_str())
    }

    fn get<T: FromStr>(&mut self, key: &str, default: T, what: &str) -> T {
        match self.map.get(key) {
            None => default,
            Some((line, v)) => match v.parse::<T>() {
                Ok(x) => x,
                Err(_) => {
                    self.errors
                        .push(format!("{key}: expected {what}, got '{v}' (line {line})"));
                    default
                }
            },
        }
    }

    fn opt<T: FromStr>(&mut self, key: &str, what: &str) -> Option<T> {
        let (line, v) = self.map.get(key)?.clone();
        match v.parse::<T>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.errors
                    .push(format!("{key}: expected {what}, got '{v}' (line {line})"));
                None
            }
        }
    }

    fn list<T: FromStr>(&mut self, key: &str, what: &str) -> Option<Vec<T>> {
        let (line, v) = self.map.get(key)?.clone();
        match parse_list::<T>(&v) {
            Some(x) => Some(x),
            None => {
                self.errors.push(format!(
                    "{key}: expected a comma-separated list of {what}, got '{v}' (line {line})"
                ));
                None
            }
        }
    }

    fn bool(&mut self, key: &str, default: bool) -> bool {
        match self.raw(key) {
            None => default,
            Some("true") | Some("yes") | Some("1") => true,
            Some("false") | Some("no") | Some("0") => false,
            Some(v) => {
                self.errors.push(format!("{key}: expected true or false, got '{v}'"));
                default
            }
        }
    }
}

/// Parses `a, b, c`; an empty string is an empty list.
pub fn parse_list<T: FromStr>(s: &str) -> Option<Vec<T>> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    if s.trim().is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|p| p.trim().parse::<T>().ok()).collect()
}

fn tokenize(text: &str) -> Entries {
    let mut map = BTreeMap::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            errors.push(format!("line {}: expected 'key = value', got '{line}'", i + 1));
            continue;
        };
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if !KNOWN_KEYS.contains(&k.as_str()) {
            errors.push(format!("{k}: unknown key (line {})", i + 1));
            continue;
        }
        if map.insert(k.clone(), (i + 1, v)).is_some() {
            errors.push(format!("{k}: assigned more than once (line {})", i + 1));
        }
    }
    Entries { map, errors }
}

fn parse_problem(e: &mut Entries) -> Option<ProblemSpec> {
    let name = match e.raw("problem.name") {
        None => {
            e.errors.push("problem.name: required".into());
            None
        }
        Some(v) => match v.parse::<ProblemName>() {
            Ok(p) => Some(p),
            Err(_) => {
                let names: Vec<_> = ProblemName::ALL.iter().map(|p| p.as_str()).collect();
                e.errors.push(format!(
                    "problem.name: unknown problem '{v}' (known: {})",
                    names.join(", ")
                ));
                None
            }
        },
    };
    let n: usize = e.get("problem.n", 0, "a positive integer");
    if !e.map.contains_key("problem.n") {
        e.errors.push("problem.n: required".into());
    }
    let name = name?;
    let mut spec = ProblemSpec::new(name, n);
    spec.m = e.get("problem.m", spec.m, "a positive integer");
    spec.d = e.get("problem.d", spec.d, "a positive integer");
    spec.data_seed = e.get("problem.data_seed", spec.data_seed, "an unsigned integer");
    spec.radius = e.get("problem.radius", spec.radius, "a number");
    spec.q_shift = e.get("problem.q_shift", spec.q_shift, "a number");
    spec.outer_weight = e.get("problem.outer_weight", spec.outer_weight, "a number");
    spec.noise_scale = e.get("problem.noise_scale", spec.noise_scale, "a number");
    spec.scenario_law = match e.raw("problem.law").unwrap_or("uniform_cube") {
        "uniform_cube" => ScenarioLaw::UniformCube,
        "rademacher" => ScenarioLaw::Rademacher,
        "point_mass" => match e.list::<f64>("problem.law.point", "numbers") {
            Some(p) => ScenarioLaw::PointMass(p),
            None => {
                if !e.map.contains_key("problem.law.point") {
                    e.errors.push("problem.law.point: required for point_mass".into());
                }
                ScenarioLaw::PointMass(vec![0.0; spec.d])
            }
        },
        other => {
            e.errors.push(format!(
                "problem.law: unknown law '{other}' (known: uniform_cube, rademacher, point_mass)"
            ));
            ScenarioLaw::UniformCube
        }
    };
    if let Some(kind) = e.raw("problem.regularizer.kind").map(str::to_string) {
        let weight = e.get("problem.regularizer.weight", 1.0, "a number");
        let lo = e.get("problem.regularizer.lo", -1.0, "a number");
        let hi = e.get("problem.regularizer.hi", 1.0, "a number");
        let radius = e.get("problem.regularizer.radius", 1.0, "a number");
        spec.regularizer = match kind.as_str() {
            "zero" => RegularizerSpec::Zero,
            "l1" => RegularizerSpec::L1 { weight },
            "box" => RegularizerSpec::Box { lo, hi },
            "l2ball" => RegularizerSpec::L2Ball { radius },
            "l1_plus_box" => RegularizerSpec::L1PlusBox { weight, lo, hi },
            other => {
                e.errors.push(format!(
                    "problem.regularizer.kind: unknown kind '{other}' (known: zero, l1, box, l2ball, l1_plus_box)"
                ));
                spec.regularizer
            }
        };
    } else {
        for k in ["weight", "lo", "hi", "radius"] {
            if e.map.contains_key(&format!("problem.regularizer.{k}")) {
                e.errors
                    .push(format!("problem.regularizer.{k}: set without problem.regularizer.kind"));
            }
        }
    }
    if n > 0 {
        for v in spec.violations() {
            let (field, msg) = v.split_once(": ").unwrap_or(("", &v));
            e.errors.push(format!("problem.{field}: {msg}"));
        }
    }
    Some(spec)
}

fn parse_oracle(e: &mut Entries, name: Option<ProblemName>) -> OracleSpec {
    let mut o = name.map(OracleSpec::default_for).unwrap_or_else(OracleSpec::exact);
    if let Some(k) = e.raw("oracle.kind") {
        match k.parse::<OracleKind>() {
            Ok(kind) => o.kind = kind,
            Err(_) => e
                .errors
                .push(format!("oracle.kind: unknown kind '{k}' (known: exact, noisy, inner)")),
        }
    }
    o.delta = e.get("oracle.delta", o.delta, "a number");
    o.noise_seed = e.get("oracle.noise_seed", o.noise_seed, "an unsigned integer");
    o.noise_shape = match e.raw("oracle.noise_shape").unwrap_or("symmetric") {
        "symmetric" => NoiseShape::Symmetric,
        "one_sided" => NoiseShape::OneSided,
        other => {
            e.errors.push(format!(
                "oracle.noise_shape: unknown shape '{other}' (known: symmetric, one_sided)"
            ));
            NoiseShape::Symmetric
        }
    };
    o.tol = e.get("oracle.tol", o.tol, "a number");
    o.budget = e.get("oracle.budget", o.budget, "a positive integer");
    o.samples = e.get("oracle.samples", o.samples, "a positive integer");
    o.sample_seed = e.get("oracle.sample_seed", o.sample_seed, "an unsigned integer");
    if !(o.delta >= 0.0 && o.delta.is_finite()) {
        e.errors.push(format!("oracle.delta: must be >= 0, got {}", o.delta));
    }
    if !(o.tol > 0.0 && o.tol.is_finite()) {
        e.errors.push(format!("oracle.tol: must be > 0, got {}", o.tol));
    }
    if o.budget == 0 {
        e.errors.push("oracle.budget: must be >= 1".into());
    }
    if o.samples == 0 {
        e.errors.push("oracle.samples: must be >= 1".into());
    }
    if o.kind == OracleKind::Noisy && !e.map.contains_key("oracle.delta") {
        e.errors.push("oracle.delta: required for the noisy oracle".into());
    }
    o
}

fn parse_solver(e: &mut Entries, spec: Option<&ProblemSpec>) -> SolverSettings {
    let mu: f64 = e.get("solver.mu", 0.1, "a number");
    let horizon: usize = e.get("solver.T", 1000, "a nonnegative integer");
    let step_mode = match e.raw("solver.step_mode").unwrap_or("theorem_b1") {
        "theorem_b1" => StepMode::TheoremB1,
        "theorem_b2" => StepMode::TheoremB2,
        "constant" => match e.opt::<f64>("solver.step", "a number") {
            Some(a) => StepMode::Constant(a),
            None => {
                if !e.map.contains_key("solver.step") {
                    e.errors.push("solver.step: required for constant step_mode".into());
                }
                StepMode::Constant(1.0)
            }
        },
        "custom" => match e.list::<f64>("solver.steps", "numbers") {
            Some(v) => StepMode::Custom(v),
            None => {
                if !e.map.contains_key("solver.steps") {
                    e.errors.push("solver.steps: required for custom step_mode".into());
                }
                StepMode::Custom(Vec::new())
            }
        },
        other => {
            e.errors.push(format!(
                "solver.step_mode: unknown mode '{other}' (known: theorem_b1, theorem_b2, constant, custom)"
            ));
            StepMode::TheoremB1
        }
    };
    let phi_upper = match e.raw("solver.phi_upper") {
        Some("auto") => PhiUpper::Auto,
        _ => PhiUpper::Value(e.get("solver.phi_upper", 1.0, "a number or 'auto'")),
    };
    let c_const: f64 = e.get("solver.c", 1.0, "a number");
    let rho_bar_factor = e.get("solver.rho_bar_factor", 2.0, "a number");
    let seed = e.get("solver.seed", 0u64, "an unsigned integer");
    let iterate_cap = e.get("solver.iterate_cap", DEFAULT_ITERATE_CAP, "a positive integer");
    let x0 = e.list::<f64>("solver.x0", "numbers");

    if !(mu > 0.0 && mu.is_finite()) {
        e.errors.push(format!("solver.mu: must be > 0, got {mu}"));
    }
    if !(c_const > 0.0 && c_const.is_finite()) {
        e.errors.push(format!("solver.c: must be > 0, got {c_const}"));
    }
    if !(rho_bar_factor > 1.0 && rho_bar_factor <= 2.0) {
        e.errors.push(format!(
            "solver.rho_bar_factor: must lie in (1, 2], got {rho_bar_factor}"
        ));
    }
    if let PhiUpper::Value(p) = phi_upper {
        if !(p > 0.0 && p.is_finite()) {
            e.errors.push(format!("solver.phi_upper: must be > 0, got {p}"));
        }
    }
    match &step_mode {
        StepMode::Constant(a) if !(*a > 0.0) => e.errors.push(format!("solver.step: must be > 0, got {a}")),
        StepMode::Custom(v) if !e.map.contains_key("sweep.T_values") && v.len() != horizon + 1 => {
            e.errors.push(format!(
                "solver.steps: length {} does not match T + 1 = {}",
                v.len(),
                horizon + 1
            ))
        }
        _ => {}
    }
    if iterate_cap < 2 {
        e.errors.push("solver.iterate_cap: must be >= 2".into());
    }
    let x0 = match (x0, spec) {
        (Some(x), Some(spec)) => {
            if x.len() != spec.n {
                e.errors
                    .push(format!("solver.x0: has {} entries, problem.n is {}", x.len(), spec.n));
            } else if let Ok(r) = spec.regularizer.build::<f64>(spec.n) {
                if !r.contains(&x) {
                    e.errors
                        .push(format!("solver.x0: {x:?} is outside dom r ({})", r.kind_name()));
                }
            }
            x
        }
        (Some(x), None) => x,
        (None, Some(spec)) => {
            let zero = vec![0.0; spec.n];
            if let Ok(r) = spec.regularizer.build::<f64>(spec.n) {
                if !r.contains(&zero) {
                    e.errors
                        .push("solver.x0: required because the origin is outside dom r".into());
                }
            }
            zero
        }
        (None, None) => Vec::new(),
    };
    SolverSettings {
        mu,
        horizon,
        step_mode,
        phi_upper,
        c_const,
        rho_bar_factor,
        seed,
        x0,
        iterate_cap,
    }
}

fn parse_certify(e: &mut Entries) -> CertifySettings {
    let enabled = e.bool("certify.enabled", false);
    let epsilon = e.get("certify.epsilon", 0.1, "a number");
    let lambda = e.opt::<f64>("certify.lambda", "a number");
    let rho = e.opt::<f64>("certify.rho", "a number");
    let iters = e.get("certify.iters", 400usize, "a positive integer");
    let batch = e.get("certify.batch", 64usize, "a positive integer");
    let step = e.opt::<f64>("certify.step", "a number");
    let seed = e.get("certify.seed", 0u64, "an unsigned integer");
    let cadence = match e.raw("certify.cadence").unwrap_or("default") {
        "default" | "quartiles" => Cadence::Quartiles,
        "tstar" => Cadence::TStar,
        _ => Cadence::List(
            e.list::<usize>("certify.cadence", "iteration indices, 'default' or 'tstar'")
                .unwrap_or_default(),
        ),
    };
    if !(epsilon > 0.0) {
        e.errors.push(format!("certify.epsilon: must be > 0, got {epsilon}"));
    }
    if let Some(l) = lambda {
        if !(l > 0.0) {
            e.errors.push(format!("certify.lambda: must be > 0, got {l}"));
        }
    }
    if let Some(r) = rho {
        if !(r >= 0.0) {
            e.errors.push(format!("certify.rho: must be >= 0, got {r}"));
        }
    }
    if iters == 0 {
        e.errors.push("certify.iters: must be >= 1".into());
    }
    if batch == 0 {
        e.errors.push("certify.batch: must be >= 1".into());
    }
    CertifySettings {
        enabled,
        epsilon,
        lambda,
        rho,
        iters,
        batch,
        step,
        cadence,
        seed,
    }
}

/// Parses and validates a config, reporting every violation.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let mut e = tokenize(text);
    let problem = parse_problem(&mut e);
    let oracle = parse_oracle(&mut e, problem.as_ref().map(|p| p.name));
    let solver = parse_solver(&mut e, problem.as_ref());
    let certify = parse_certify(&mut e);
    let reference_scenarios = e.get("reference.scenarios", 200usize, "a positive integer");
    let seeds = e
        .list::<u64>("sweep.seeds", "unsigned integers")
        .unwrap_or_else(|| vec![solver.seed]);
    let t_values = e
        .list::<usize>("sweep.T_values", "nonnegative integers")
        .unwrap_or_else(|| vec![solver.horizon]);
    if seeds.is_empty() {
        e.errors.push("sweep.seeds: must not be empty".into());
    }
    if t_values.is_empty() {
        e.errors.push("sweep.T_values: must not be empty".into());
    }
    if let StepMode::Custom(v) = &solver.step_mode {
        if e.map.contains_key("sweep.T_values") && t_values.iter().any(|&t| t + 1 != v.len()) {
            e.errors
                .push("solver.steps: custom steps need every sweep.T_values entry to equal len - 1".into());
        }
    }
    let output_dir = PathBuf::from(e.raw("output_dir").unwrap_or("zop_out"));

    if let Some(spec) = &problem {
        if e.errors.is_empty() {
            if let Err(err) = build_instance::<f64>(spec) {
                e.errors.push(format!("problem: {err}"));
            }
            let has_inner = matches!(
                spec.name,
                ProblemName::TwoStageQp | ProblemName::MmInstant | ProblemName::MmErgodic
            );
            match oracle.kind {
                OracleKind::Inner if !has_inner => e
                    .errors
                    .push(format!("oracle.kind: {} has no inner problem", spec.name)),
                OracleKind::Exact | OracleKind::Noisy if spec.name == ProblemName::TwoStageQp => e
                    .errors
                    .push("oracle.kind: two_stage_qp has no closed form; use 'inner'".into()),
                _ => {}
            }
        }
    }
    if !e.errors.is_empty() {
        return Err(ConfigErrors(e.errors));
    }
    Ok(ExperimentConfig {
        problem: problem.expect("checked"),
        oracle,
        solver,
        certify,
        reference_scenarios,
        sweep: Sweep { seeds, t_values },
        output_dir,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "problem.name = norm_sharp\nproblem.n = 5\nsolver.T = 1000\nsolver.seed = 1\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.problem.name, ProblemName::NormSharp);
        assert_eq!(c.problem.n, 5);
        assert_eq!(c.solver.horizon, 1000);
        assert_eq!(c.solver.seed, 1);
        assert_eq!(c.solver.x0, vec![0.0; 5]);
        assert_eq!(c.solver.rho_bar_factor, 2.0);
        assert_eq!(c.oracle.kind, OracleKind::Exact);
        assert_eq!(c.runs(), vec![(1, 1000)]);
        assert!(!c.certify.enabled);
    }

    #[test]
    fn negative_mu_names_its_key() {
        let err = parse_config(&format!("{MINIMAL}solver.mu = -0.1\n")).unwrap_err();
        assert!(err.mentions("solver.mu"), "{err}");
    }

    #[test]
    fn x0_outside_box_names_its_key() {
        let text = "problem.name = cusp_box\nproblem.n = 2\nsolver.x0 = 3.0, 0.0\n";
        let err = parse_config(text).unwrap_err();
        assert!(err.mentions("solver.x0"), "{err}");
    }

    #[test]
    fn all_violations_are_reported() {
        let text = "problem.name = norm_sharp\nproblem.n = 2\nsolver.mu = 0\nsolver.rho_bar_factor = 3\nbogus.key = 1\noracle.tol = x\n";
        let err = parse_config(text).unwrap_err();
        for key in ["solver.mu", "solver.rho_bar_factor", "bogus.key", "oracle.tol"] {
            assert!(err.mentions(key), "missing {key} in {err}");
        }
    }

    #[test]
    fn comments_and_lists() {
        let text = "# header\nproblem.name = l1_minus_l2 # inline\nproblem.n = 4\nsweep.seeds = 1, 2, 3\nsweep.T_values = 10,20\ncertify.cadence = tstar\nsolver.phi_upper = auto\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.runs().len(), 6);
        assert_eq!(c.certify.cadence, Cadence::TStar);
        assert_eq!(c.solver.phi_upper, PhiUpper::Auto);
    }

    #[test]
    fn oracle_must_match_problem() {
        let err = parse_config("problem.name = norm_sharp\nproblem.n = 2\noracle.kind = inner\n").unwrap_err();
        assert!(err.mentions("oracle.kind"));
        let c = parse_config("problem.name = two_stage_qp\nproblem.n = 2\n").unwrap();
        assert_eq!(c.oracle.kind, OracleKind::Inner);
    }

    #[test]
    fn cadence_indices() {
        assert_eq!(Cadence::Quartiles.indices(8), vec![0, 2, 4, 6, 8]);
        assert_eq!(Cadence::Quartiles.indices(0), vec![0]);
        assert_eq!(Cadence::List(vec![5, 1, 99]).indices(10), vec![1, 5]);
    }

    #[test]
    fn missing_required_keys() {
        let err = parse_config("solver.T = 5\n").unwrap_err();
        assert!(err.mentions("problem.name"));
        assert!(err.mentions("problem.n"));
    }
}
