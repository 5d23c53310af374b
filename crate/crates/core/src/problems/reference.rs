//! Brute-force ground truth for small instances.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Regularizer, Scenario};
use crate::rng::StreamKey;
use crate::Scalar;

use super::{build_instance, Instance, ProblemName, ProblemSpec};

/// Largest grid evaluated before giving up.
const MAX_GRID_POINTS: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMethod {
    Grid,
    SaaGrid,
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub x_ref: Vec<f64>,
    pub phi_ref: f64,
    /// Largest grid objective; `None` for closed-form references.
    pub phi_max: Option<f64>,
    pub method: ReferenceMethod,
    pub resolution: f64,
    pub num_scenarios: usize,
}

/// The `K` scenarios of the sample-average objective, fixed by the data seed.
pub fn saa_scenarios<T: Scalar>(instance: &Instance<T>, k: usize) -> Vec<Scenario<T>> {
    let key = StreamKey::root(instance.spec.data_seed).child("saa");
    let stream = instance.problem.scenario_stream(key);
    (0..k as u64).map(|i| stream.draw(i)).collect()
}

/// Minimizes the SAA objective over a grid of `dom r` (`n <= 3`).
pub fn reference_solution(spec: &ProblemSpec, resolution: f64, num_scenarios: usize) -> Result<ReferenceSolution> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::Input(format!("resolution must be > 0, got {resolution}")));
    }
    let instance = build_instance::<f64>(spec)?;
    let r = &instance.problem.r;
    if spec.name == ProblemName::NormSharp && r.contains(&vec![0.0; spec.n]) && r.value(&vec![0.0; spec.n]) == 0.0 {
        return Ok(ReferenceSolution {
            x_ref: vec![0.0; spec.n],
            phi_ref: 0.0,
            phi_max: None,
            method: ReferenceMethod::ClosedForm,
            resolution: 0.0,
            num_scenarios: 0,
        });
    }
    if spec.n > 3 {
        return Err(Error::Unsupported(format!(
            "grid reference needs n <= 3, got {}",
            spec.n
        )));
    }
    let (lo, hi) = match r {
        Regularizer::BoxIndicator { lo, hi } | Regularizer::L1PlusBox { lo, hi, .. } => (lo.clone(), hi.clone()),
        Regularizer::L2BallIndicator { radius } => (vec![-*radius; spec.n], vec![*radius; spec.n]),
        _ => return Err(Error::Unsupported("grid reference needs a bounded domain".into())),
    };
    let axes: Vec<Vec<f64>> = lo
        .iter()
        .zip(&hi)
        .map(|(&l, &h)| {
            let count = ((h - l) / resolution + 1e-9).floor() as usize + 1;
            (0..count).map(|i| l + i as f64 * resolution).collect()
        })
        .collect();
    let total: usize = axes.iter().map(Vec::len).product();
    if total > MAX_GRID_POINTS {
        return Err(Error::Unsupported(format!(
            "grid has {total} points; coarsen the resolution"
        )));
    }
    let (scenarios, method) = if spec.name.is_deterministic() {
        (saa_scenarios(&instance, 1), ReferenceMethod::Grid)
    } else {
        if num_scenarios == 0 {
            return Err(Error::Input("SAA reference needs at least one scenario".into()));
        }
        (saa_scenarios(&instance, num_scenarios), ReferenceMethod::SaaGrid)
    };
    let point = |mut idx: usize| -> Vec<f64> {
        axes.iter()
            .map(|ax| {
                let v = ax[idx % ax.len()];
                idx /= ax.len();
                v
            })
            .collect()
    };
    let values: Vec<Option<f64>> = (0..total)
        .into_par_iter()
        .map(|i| {
            let x = point(i);
            if r.contains(&x) {
                instance.saa_objective(&scenarios, &x).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, f64)> = None;
    let mut worst = f64::NEG_INFINITY;
    for (i, v) in values.iter().enumerate() {
        if let Some(v) = *v {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((i, v));
            }
            worst = worst.max(v);
        }
    }
    let (i, phi_ref) = best.ok_or_else(|| Error::Input("grid has no point inside dom r".into()))?;
    Ok(ReferenceSolution {
        x_ref: point(i),
        phi_ref,
        phi_max: Some(worst),
        method,
        resolution,
        num_scenarios: scenarios.len(),
    })
}
