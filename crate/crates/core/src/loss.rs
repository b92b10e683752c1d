//! Weighted least-squares residual.
//!
//! The training loss is
//!
//! ```text
//! J(θ) = (1/m) Σ_i w(x_i) |L_ε u(x_i) − f(x_i)|² + (1/m_b) Σ_j |u(x_b_j) − g(x_b_j)|²
//! ```
//!
//! with the `√(w/m)` and `√(1/m_b)` factors folded into the residual entries,
//! so that `J = ‖r‖²`.

use crate::autodiff::{check_compatible, eval_solution_jet, SolutionJet};
use crate::error::{Error, Result};
use crate::network::SolutionModel;
use crate::problems::ProblemSpec;
use crate::sampling::CollocationSet;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedResidual {
    /// Interior rows (point-major, component-minor), then boundary rows.
    pub entries: Vec<f64>,
    pub interior_rows: usize,
}

impl WeightedResidual {
    pub fn interior(&self) -> &[f64] {
        &self.entries[..self.interior_rows]
    }

    pub fn boundary(&self) -> &[f64] {
        &self.entries[self.interior_rows..]
    }
}

/// Residual from arbitrary evaluators: `jet_at` supplies `u, ∇u, Δu` at
/// residual points and `value_at` supplies `u` at boundary points.
pub fn build_residual_with(
    problem: &ProblemSpec,
    colloc: &CollocationSet,
    epsilon: f64,
    mut jet_at: impl FnMut(&[f64]) -> Result<SolutionJet>,
    mut value_at: impl FnMut(&[f64]) -> Result<Vec<f64>>,
) -> Result<WeightedResidual> {
    let n = problem.n_components;
    let (m, mb) = (colloc.m(), colloc.m_b());
    let mut entries = Vec::with_capacity(n * (m + mb));

    for (kind, idx, point) in colloc.interior_points() {
        let jet = jet_at(point).map_err(|e| e.at_point(kind, idx))?;
        let scale = (problem.weight(point) / m as f64).sqrt();
        for r in problem.residual(&jet, point, epsilon) {
            let v = scale * r;
            if !v.is_finite() {
                return Err(Error::NonFinite("residual".into()).at_point(kind, idx));
            }
            entries.push(v);
        }
    }
    let interior_rows = entries.len();

    let scale = (1.0 / mb.max(1) as f64).sqrt();
    for (j, point) in colloc.boundary.iter().enumerate() {
        let u = value_at(point).map_err(|e| e.at_point("boundary", j))?;
        let g = problem.boundary_value(point, epsilon);
        for k in 0..n {
            let v = scale * (u[k] - g[k]);
            if !v.is_finite() {
                return Err(Error::NonFinite("boundary residual".into()).at_point("boundary", j));
            }
            entries.push(v);
        }
    }
    Ok(WeightedResidual { entries, interior_rows })
}

pub fn build_residual(
    problem: &ProblemSpec,
    model: &SolutionModel,
    colloc: &CollocationSet,
) -> Result<WeightedResidual> {
    check_compatible(problem, model)?;
    build_residual_with(
        problem,
        colloc,
        model.epsilon(),
        |p| eval_solution_jet(model, p),
        |p| model.forward(p),
    )
}

pub fn loss_value(residual: &WeightedResidual) -> f64 {
    sum_of_squares(&residual.entries)
}

/// Neumaier-compensated `Σ v_i²`.
pub fn sum_of_squares(v: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in v {
        let y = x * x;
        let t = sum + y;
        if sum.abs() >= y {
            comp += (sum - t) + y;
        } else {
            comp += (y - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
