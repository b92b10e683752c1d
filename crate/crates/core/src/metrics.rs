//! Error measurement and trained-model diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Geometry, SolutionModel};
use crate::problems::{Domain, ProblemSpec};
use crate::sampling::CollocationSet;

/// Grid size used by [`layer_detection_ratio`].
pub const DETECTION_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeErrors {
    pub rel_l2: f64,
    pub rel_linf: f64,
}

/// Discrete relative `ℓ²` and `ℓ^∞` errors of one component.
pub fn relative_errors(exact: &[f64], predicted: &[f64]) -> Result<RelativeErrors> {
    if exact.len() != predicted.len() {
        return Err(Error::Shape(format!(
            "{} exact values vs {} predictions",
            exact.len(),
            predicted.len()
        )));
    }
    let (mut num2, mut den2, mut numi, mut deni) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (u, v) in exact.iter().zip(predicted) {
        let e = u - v;
        num2 += e * e;
        den2 += u * u;
        numi = numi.max(e.abs());
        deni = deni.max(u.abs());
    }
    if deni == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(RelativeErrors {
        rel_l2: num2.sqrt() / den2.sqrt(),
        rel_linf: numi / deni,
    })
}

/// Per-component errors of one or more trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// Mean over trials, per component.
    pub rel_l2: Vec<f64>,
    pub rel_linf: Vec<f64>,
    pub n_test: usize,
    pub trials: usize,
    /// `per_trial[t][k]`.
    pub per_trial: Vec<Vec<RelativeErrors>>,
}

impl ErrorReport {
    pub fn single(errors: Vec<RelativeErrors>, n_test: usize) -> Self {
        Self {
            rel_l2: errors.iter().map(|e| e.rel_l2).collect(),
            rel_linf: errors.iter().map(|e| e.rel_linf).collect(),
            n_test,
            trials: 1,
            per_trial: vec![errors],
        }
    }

    pub fn n_components(&self) -> usize {
        self.rel_l2.len()
    }
}

/// Errors of `model` against the exact solution over every test point,
/// boundary points included.
pub fn evaluate_model(problem: &ProblemSpec, model: &SolutionModel, test: &CollocationSet) -> Result<ErrorReport> {
    let n = problem.n_components;
    let eps = model.epsilon();
    let mut exact = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    let points = test
        .interior
        .iter()
        .chain(test.layer.iter())
        .chain(test.boundary.iter());
    for (i, p) in points.enumerate() {
        let u = problem.exact_solution(p, eps)?;
        let v = model.forward(p).map_err(|e| e.at_point("test", i))?;
        for k in 0..n {
            exact[k].push(u[k]);
            pred[k].push(v[k]);
        }
    }
    let errors = (0..n)
        .map(|k| relative_errors(&exact[k], &pred[k]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorReport::single(errors, exact[0].len()))
}

/// Componentwise mean over trials.
pub fn aggregate_trials(reports: &[ErrorReport]) -> Result<ErrorReport> {
    let first = reports.first().ok_or_else(|| Error::Aggregate("no reports".into()))?;
    let n = first.n_components();
    if let Some(r) = reports
        .iter()
        .find(|r| r.n_components() != n || r.n_test != first.n_test)
    {
        return Err(Error::Aggregate(format!(
            "mismatched reports: {} components / {} test points vs {} / {}",
            r.n_components(),
            r.n_test,
            n,
            first.n_test
        )));
    }
    let per_trial: Vec<Vec<RelativeErrors>> = reports.iter().flat_map(|r| r.per_trial.iter().cloned()).collect();
    let t = per_trial.len() as f64;
    let mean = |f: fn(&RelativeErrors) -> f64| -> Vec<f64> {
        (0..n)
            .map(|k| per_trial.iter().map(|e| f(&e[k])).sum::<f64>() / t)
            .collect()
    };
    Ok(ErrorReport {
        rel_l2: mean(|e| e.rel_l2),
        rel_linf: mean(|e| e.rel_linf),
        n_test: first.n_test,
        trials: per_trial.len(),
        per_trial,
    })
}

/// Range of the right singular block over the range of the left one, on a
/// uniform grid of [`DETECTION_GRID`] points (endpoints included). Small
/// values mean the right block has flattened to a constant.
pub fn layer_detection_ratio(model: &SolutionModel, problem: &ProblemSpec) -> Result<f64> {
    if model.geometry() != Geometry::OneD {
        return Err(Error::Incompatible(
            "detection ratio needs a one-dimensional model".into(),
        ));
    }
    let Domain::Interval { a, b } = problem.domain else {
        return Err(Error::Incompatible(format!(
            "{} is not an interval problem",
            problem.id
        )));
    };
    let n = model.n_components();
    let mut lo = [vec![f64::INFINITY; n], vec![f64::INFINITY; n]];
    let mut hi = [vec![f64::NEG_INFINITY; n], vec![f64::NEG_INFINITY; n]];
    for i in 0..DETECTION_GRID {
        let x = a + (b - a) * i as f64 / (DETECTION_GRID - 1) as f64;
        let out = model.component_outputs(&[x])?;
        for (s, name) in ["L", "R"].iter().enumerate() {
            let v = &out.blocks.iter().find(|(nm, _)| nm == name).unwrap().1;
            for k in 0..n {
                lo[s][k] = lo[s][k].min(v[k]);
                hi[s][k] = hi[s][k].max(v[k]);
            }
        }
    }
    let range = |s: usize| (0..n).map(|k| hi[s][k] - lo[s][k]).fold(0.0f64, f64::max);
    let (left, right) = (range(0), range(1));
    if left == 0.0 {
        return Ok(if right == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(right / left)
}
