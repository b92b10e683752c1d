//! Levenberg–Marquardt for dense nonlinear least squares.
//!
//! Each iteration solves `(JᵀJ + λI) δ = −Jᵀr` by Cholesky. A proposal is
//! accepted when it lowers `‖r‖²`, after which λ shrinks; otherwise λ grows
//! and the step is recomputed from the same normal equations.

use std::io::Write;
use std::time::Instant;

use faer::linalg::matmul::triangular::{self, BlockStructure};
use faer::linalg::solvers::Solve;
use faer::{Accum, Mat, MatRef, Par, Side};
use serde::{Deserialize, Serialize};

use crate::autodiff::{assemble_residual_jacobian, ResidualJacobian};
use crate::error::{Error, Result};
use crate::loss::{build_residual, sum_of_squares};
use crate::network::SolutionModel;
use crate::problems::ProblemSpec;
use crate::sampling::CollocationSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LmConfig {
    pub max_iters: usize,
    pub loss_tol: f64,
    pub lambda_init: f64,
    pub lambda_up: f64,
    pub lambda_down: f64,
    pub min_lambda: f64,
    pub max_lambda: f64,
    /// Relative step size below which the iteration is considered stalled.
    pub step_tol: f64,
    /// Rejected proposals allowed within one iteration.
    pub max_rejections: usize,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            loss_tol: 1e-15,
            lambda_init: 1e-3,
            lambda_up: 3.0,
            lambda_down: 1.0 / 3.0,
            min_lambda: 1e-14,
            max_lambda: 1e14,
            step_tol: 1e-15,
            max_rejections: 60,
        }
    }
}

impl LmConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.lambda_up > 1.0 && self.lambda_down < 1.0 && self.lambda_down > 0.0) {
            return bad("need lambda_up > 1 > lambda_down > 0");
        }
        if !(self.loss_tol > 0.0 && self.step_tol >= 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.min_lambda >= 0.0 && self.min_lambda <= self.max_lambda) {
            return bad("need 0 <= min_lambda <= max_lambda");
        }
        if !(self.lambda_init >= self.min_lambda && self.lambda_init <= self.max_lambda) {
            return bad("lambda_init outside [min_lambda, max_lambda]");
        }
        if self.max_rejections == 0 {
            return bad("max_rejections must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    LossTol,
    MaxIters,
    Stalled,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::LossTol => "loss_tol",
            StopReason::MaxIters => "max_iters",
            StopReason::Stalled => "stalled",
        }
    }
}

/// One proposal of the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmEvent {
    pub iteration: usize,
    pub loss: f64,
    pub lambda: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub final_loss: f64,
    pub iterations: usize,
    pub stop_reason: StopReason,
    /// Initial loss followed by the loss after every accepted step.
    pub loss_history: Vec<f64>,
    pub events: Vec<LmEvent>,
    pub seed: u64,
    pub wall_time: f64,
}

impl TrainReport {
    /// `iteration,loss,lambda,accepted`, one row per proposal; row 0 is the
    /// initial loss.
    pub fn write_history_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iteration,loss,lambda,accepted")?;
        if let Some(first) = self.loss_history.first() {
            writeln!(w, "0,{first:e},,true")?;
        }
        for e in &self.events {
            writeln!(w, "{},{:e},{:e},{}", e.iteration, e.loss, e.lambda, e.accepted)?;
        }
        Ok(())
    }
}

/// A problem `min ‖r(θ)‖²` with a dense Jacobian.
pub trait LeastSquares {
    fn params(&self) -> Vec<f64>;
    fn set_params(&mut self, theta: &[f64]) -> Result<()>;
    fn residual(&self) -> Result<Vec<f64>>;
    fn residual_jacobian(&self) -> Result<ResidualJacobian>;
}

/// The weighted PINN residual of a model on fixed collocation points.
pub struct PinnObjective<'a> {
    pub problem: &'a ProblemSpec,
    pub model: &'a mut SolutionModel,
    pub colloc: &'a CollocationSet,
}

impl LeastSquares for PinnObjective<'_> {
    fn params(&self) -> Vec<f64> {
        self.model.theta()
    }

    fn set_params(&mut self, theta: &[f64]) -> Result<()> {
        self.model.set_theta(theta)
    }

    fn residual(&self) -> Result<Vec<f64>> {
        Ok(build_residual(self.problem, self.model, self.colloc)?.entries)
    }

    fn residual_jacobian(&self) -> Result<ResidualJacobian> {
        assemble_residual_jacobian(self.problem, self.model, self.colloc)
    }
}

/// `JᵀJ` (lower triangle) and `Jᵀr` for one linearisation.
pub struct NormalEquations {
    jtj: Mat<f64>,
    jtr: Vec<f64>,
}

impl NormalEquations {
    pub fn new(jac: &ResidualJacobian) -> Result<Self> {
        if jac.residual.len() != jac.rows || jac.data.len() != jac.rows * jac.cols {
            return Err(Error::Shape(format!(
                "jacobian {}x{} with {} entries and residual of length {}",
                jac.rows,
                jac.cols,
                jac.data.len(),
                jac.residual.len()
            )));
        }
        let p = jac.cols;
        let j: MatRef<'_, f64> = jac.as_mat();
        let mut jtj = Mat::<f64>::zeros(p, p);
        triangular::matmul(
            jtj.as_mut(),
            BlockStructure::TriangularLower,
            Accum::Replace,
            j.transpose(),
            BlockStructure::Rectangular,
            j,
            BlockStructure::Rectangular,
            1.0,
            Par::Seq,
        );
        let mut jtr = vec![0.0; p];
        for (row, r) in jac.data.chunks_exact(p.max(1)).zip(&jac.residual) {
            for (g, a) in jtr.iter_mut().zip(row) {
                *g += a * r;
            }
        }
        Ok(Self { jtj, jtr })
    }

    pub fn gradient(&self) -> &[f64] {
        &self.jtr
    }

    /// Solves `(JᵀJ + λI) δ = −Jᵀr`, escalating a diagonal jitter when the
    /// factorization fails.
    pub fn solve(&self, lambda: f64) -> Result<Vec<f64>> {
        let p = self.jtr.len();
        let scale = (0..p).map(|i| self.jtj[(i, i)]).fold(0.0f64, f64::max).max(1.0);
        let mut jitter = 0.0;
        for attempt in 0..8 {
            let mut g = self.jtj.clone();
            for i in 0..p {
                g[(i, i)] += lambda + jitter;
            }
            if let Ok(llt) = g.llt(Side::Lower) {
                let mut rhs = Mat::<f64>::from_fn(p, 1, |i, _| -self.jtr[i]);
                llt.solve_in_place(rhs.as_mut());
                let delta: Vec<f64> = (0..p).map(|i| rhs[(i, 0)]).collect();
                if delta.iter().all(|v| v.is_finite()) {
                    return Ok(delta);
                }
            }
            jitter = scale * 1e-14 * 100f64.powi(attempt);
        }
        Err(Error::Factorization { lambda })
    }

    /// `‖r‖² − ‖r + Jδ‖²` under the linear model.
    pub fn predicted_reduction(&self, delta: &[f64]) -> f64 {
        let p = delta.len();
        let mut quad = 0.0;
        for i in 0..p {
            let mut row = self.jtj[(i, i)] * delta[i];
            for k in 0..i {
                row += 2.0 * self.jtj[(i, k)] * delta[k];
            }
            quad += delta[i] * row;
        }
        let lin: f64 = self.jtr.iter().zip(delta).map(|(g, d)| g * d).sum();
        -2.0 * lin - quad
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmStep {
    pub candidate: Vec<f64>,
    pub delta: Vec<f64>,
    pub predicted_reduction: f64,
}

/// One damped Gauss–Newton proposal from `θ`.
pub fn lm_step(theta: &[f64], jac: &ResidualJacobian, lambda: f64) -> Result<LmStep> {
    if theta.len() != jac.cols {
        return Err(Error::Shape(format!(
            "theta has {} entries, jacobian {} columns",
            theta.len(),
            jac.cols
        )));
    }
    let ne = NormalEquations::new(jac)?;
    let delta = ne.solve(lambda)?;
    Ok(LmStep {
        candidate: theta.iter().zip(&delta).map(|(t, d)| t + d).collect(),
        predicted_reduction: ne.predicted_reduction(&delta),
        delta,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Runs LM on `obj` in place, leaving the best parameters found.
pub fn minimize<P: LeastSquares>(obj: &mut P, config: &LmConfig) -> Result<TrainReport> {
    config.validate()?;
    let start = Instant::now();
    let mut theta = obj.params();
    let mut loss = sum_of_squares(&obj.residual()?);
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss {
            iteration: 0,
            last_loss: loss,
            lambda: config.lambda_init,
        });
    }
    let mut lambda = config.lambda_init;
    let mut history = vec![loss];
    let mut events = Vec::new();
    let mut iterations = 0;

    let stop_reason = loop {
        if loss < config.loss_tol {
            break StopReason::LossTol;
        }
        if iterations >= config.max_iters {
            break StopReason::MaxIters;
        }
        iterations += 1;
        let jac = obj.residual_jacobian()?;
        let ne = NormalEquations::new(&jac)?;
        let theta_norm = norm(&theta);

        let mut accepted = false;
        let mut stalled = false;
        for _ in 0..config.max_rejections {
            let delta = match ne.solve(lambda) {
                Ok(d) => d,
                Err(Error::Factorization { .. }) => {
                    lambda *= config.lambda_up;
                    if lambda > config.max_lambda {
                        stalled = true;
                        break;
                    }
                    continue;
                }
                Err(e) => return Err(e),
            };
            if norm(&delta) <= config.step_tol * (1.0 + theta_norm) {
                stalled = true;
                break;
            }
            let candidate: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + d).collect();
            let cand_loss = match obj.set_params(&candidate).and_then(|_| obj.residual()) {
                Ok(r) => sum_of_squares(&r),
                Err(_) => f64::NAN,
            };
            if cand_loss.is_finite() && cand_loss < loss {
                events.push(LmEvent {
                    iteration: iterations,
                    loss: cand_loss,
                    lambda,
                    accepted: true,
                });
                theta = candidate;
                loss = cand_loss;
                history.push(loss);
                lambda = (lambda * config.lambda_down).max(config.min_lambda);
                accepted = true;
                break;
            }
            events.push(LmEvent {
                iteration: iterations,
                loss: cand_loss,
                lambda,
                accepted: false,
            });
            lambda *= config.lambda_up;
            if lambda > config.max_lambda {
                lambda = config.max_lambda;
                stalled = true;
                break;
            }
        }
        if !accepted {
            obj.set_params(&theta)?;
            if stalled {
                break StopReason::Stalled;
            }
        }
    };

    Ok(TrainReport {
        final_loss: loss,
        iterations,
        stop_reason,
        loss_history: history,
        events,
        seed: 0,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Trains `model` on the weighted residual of `problem` at `colloc`.
pub fn train(
    problem: &ProblemSpec,
    model: &mut SolutionModel,
    colloc: &CollocationSet,
    config: &LmConfig,
) -> Result<TrainReport> {
    let mut obj = PinnObjective { problem, model, colloc };
    minimize(&mut obj, config)
}

#[cfg(test)]
mod tests;
