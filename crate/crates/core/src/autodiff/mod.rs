//! Forward-mode derivatives in input space and parameter space.
//!
//! Spatial derivatives come from one [`Jet2`] pass per coordinate axis; the
//! Laplacian is the sum of the per-axis second derivatives, so no mixed
//! partials are ever formed. The parameter Jacobian of the residual vector is
//! built from the same passes with analytic parameter tangents.

mod jet;

pub use jet::*;

use crate::error::{Error, Result};
use crate::network::{MlpBlock, SolutionModel};
use crate::problems::ProblemSpec;
use crate::sampling::CollocationSet;

/// Value, gradient and Laplacian of every solution component at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionJet<T = f64> {
    pub dim: usize,
    pub u: Vec<T>,
    /// `n × dim`, row-major.
    pub grad_u: Vec<T>,
    pub lap: Vec<T>,
}

impl<T: Copy> SolutionJet<T> {
    pub fn grad(&self, component: usize, axis: usize) -> T {
        self.grad_u[component * self.dim + axis]
    }

    pub fn n_components(&self) -> usize {
        self.u.len()
    }
}

impl SolutionJet<f64> {
    pub fn is_finite(&self) -> bool {
        self.u
            .iter()
            .chain(&self.grad_u)
            .chain(&self.lap)
            .all(|v| v.is_finite())
    }

    /// Lifts every entry to a constant jet, seeding entry `seed` (see
    /// [`SolutionJet::entry_count`] for the ordering) with unit derivative.
    fn lift(&self, seed: Option<usize>) -> SolutionJet<Jet2> {
        let d = self.dim;
        let stride = d + 2;
        let lift = |v: f64, e: usize| Jet2::seed(v, if seed == Some(e) { 1.0 } else { 0.0 });
        let n = self.u.len();
        SolutionJet {
            dim: d,
            u: (0..n).map(|l| lift(self.u[l], l * stride)).collect(),
            grad_u: (0..n * d)
                .map(|i| lift(self.grad_u[i], (i / d) * stride + 1 + i % d))
                .collect(),
            lap: (0..n).map(|l| lift(self.lap[l], l * stride + d + 1)).collect(),
        }
    }

    /// Entries per component are ordered `u, ∂_0 u, …, ∂_{d−1} u, Δu`.
    pub fn entry_count(&self) -> usize {
        self.u.len() * (self.dim + 2)
    }
}

pub fn jet2_block_forward(block: &MlpBlock, inputs: &[Jet2]) -> Result<Vec<Jet2>> {
    block.forward_jet(inputs)
}

/// `u`, `∇u` and `Δu` of the full ansatz at `point`. The `1/ε` factors of the
/// scaled level-set inputs use the model's own ε.
pub fn eval_solution_jet(model: &SolutionModel, point: &[f64]) -> Result<SolutionJet> {
    model.check_point(point)?;
    let (n, d) = (model.n_components(), model.dim());
    let mut jet = SolutionJet {
        dim: d,
        u: vec![0.0; n],
        grad_u: vec![0.0; n * d],
        lap: vec![0.0; n],
    };
    for a in 0..d {
        let pass = model.eval_direction(point, Some(a), None)?;
        for (k, j) in pass.iter().enumerate() {
            jet.u[k] = j.value;
            jet.grad_u[k * d + a] = j.d1;
            jet.lap[k] += j.d2;
        }
    }
    if !jet.is_finite() {
        return Err(Error::NonFinite(format!("solution jet at {point:?}")));
    }
    Ok(jet)
}

/// Dense residual vector and its parameter Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualJacobian {
    pub rows: usize,
    pub cols: usize,
    /// Row-major, `rows × cols`.
    pub data: Vec<f64>,
    pub residual: Vec<f64>,
}

impl ResidualJacobian {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_mat(&self) -> faer::MatRef<'_, f64> {
        faer::MatRef::from_row_major_slice(&self.data, self.rows, self.cols)
    }
}

pub(crate) fn check_compatible(problem: &ProblemSpec, model: &SolutionModel) -> Result<()> {
    if problem.n_components != model.n_components() {
        return Err(Error::Incompatible(format!(
            "{} has {} components, model has {}",
            problem.id,
            problem.n_components,
            model.n_components()
        )));
    }
    let same = std::mem::discriminant(&problem.geometry(false)) == std::mem::discriminant(&model.geometry());
    if !same {
        return Err(Error::Incompatible(format!(
            "{} needs {:?} geometry, model is {:?}",
            problem.id,
            problem.geometry(false),
            model.geometry()
        )));
    }
    if model.level_sets() != problem.domain.model_level_sets() {
        return Err(Error::Incompatible(format!(
            "model level sets do not describe the {} domain",
            problem.id
        )));
    }
    Ok(())
}

/// Residual rows and their exact parameter derivatives.
///
/// Row layout: interior points, then layer points (point-major,
/// component-minor, scaled by `√(w/m)`), then boundary points (scaled by
/// `√(1/m_b)`). The operator is linearised in the jet entries by seeding each
/// entry in turn, so nonlinear operators are handled without special cases.
pub fn assemble_residual_jacobian(
    problem: &ProblemSpec,
    model: &SolutionModel,
    colloc: &CollocationSet,
) -> Result<ResidualJacobian> {
    check_compatible(problem, model)?;
    let (n, d, p) = (model.n_components(), model.dim(), model.num_params());
    let (m, mb) = (colloc.m(), colloc.m_b());
    if m + mb == 0 {
        return Err(Error::InvalidCounts("empty collocation set".into()));
    }
    let eps = model.epsilon();
    let rows = n * (m + mb);
    let mut out = ResidualJacobian {
        rows,
        cols: p,
        data: vec![0.0; rows * p],
        residual: vec![0.0; rows],
    };

    let stride = d + 2;
    let mut dir_tangents = vec![vec![Jet2::default(); p * n]; d];
    // entry tangents, laid out [entry][param]
    let mut entry_t = vec![0.0; n * stride * p];
    let mut coef = vec![0.0; n * n * stride];

    for (i, (kind, idx, point)) in colloc.interior_points().enumerate() {
        let wrap = |e: Error| e.at_point(kind, idx);
        model.check_point(point).map_err(wrap)?;
        let mut jet = SolutionJet {
            dim: d,
            u: vec![0.0; n],
            grad_u: vec![0.0; n * d],
            lap: vec![0.0; n],
        };
        for (a, tang) in dir_tangents.iter_mut().enumerate() {
            let pass = model.eval_direction(point, Some(a), Some(tang)).map_err(wrap)?;
            for (k, j) in pass.iter().enumerate() {
                jet.u[k] = j.value;
                jet.grad_u[k * d + a] = j.d1;
                jet.lap[k] += j.d2;
            }
        }
        if !jet.is_finite() {
            return Err(wrap(Error::NonFinite("solution jet".into())));
        }

        for l in 0..n {
            let base = l * stride;
            for j in 0..p {
                entry_t[base * p + j] = dir_tangents[0][j * n + l].value;
                let mut lap = 0.0;
                for (a, tang) in dir_tangents.iter().enumerate() {
                    let t = tang[j * n + l];
                    entry_t[(base + 1 + a) * p + j] = t.d1;
                    lap += t.d2;
                }
                entry_t[(base + d + 1) * p + j] = lap;
            }
        }

        let res = problem.residual(&jet, point, eps);
        for e in 0..n * stride {
            let lin = problem.residual(&jet.lift(Some(e)), point, eps);
            for k in 0..n {
                coef[k * n * stride + e] = lin[k].d1;
            }
        }

        let scale = (problem.weight(point) / m as f64).sqrt();
        for k in 0..n {
            let r = i * n + k;
            out.residual[r] = scale * res[k];
            let row = &mut out.data[r * p..(r + 1) * p];
            for e in 0..n * stride {
                let c = coef[k * n * stride + e];
                if c == 0.0 {
                    continue;
                }
                let c = scale * c;
                for (dst, t) in row.iter_mut().zip(&entry_t[e * p..(e + 1) * p]) {
                    *dst += c * t;
                }
            }
            if !out.residual[r].is_finite() {
                return Err(wrap(Error::NonFinite("residual".into())));
            }
        }
    }

    let scale = (1.0 / mb.max(1) as f64).sqrt();
    let tang = &mut dir_tangents[0];
    for (jb, point) in colloc.boundary.iter().enumerate() {
        let wrap = |e: Error| e.at_point("boundary", jb);
        model.check_point(point).map_err(wrap)?;
        let u = model.eval_direction(point, None, Some(tang)).map_err(wrap)?;
        let g = problem.boundary_value(point, eps);
        for k in 0..n {
            let r = (m + jb) * n + k;
            out.residual[r] = scale * (u[k].value - g[k]);
            if !out.residual[r].is_finite() {
                return Err(wrap(Error::NonFinite("boundary residual".into())));
            }
            let row = &mut out.data[r * p..(r + 1) * p];
            for (j, dst) in row.iter_mut().enumerate() {
                *dst = scale * tang[j * n + k].value;
            }
        }
    }
    Ok(out)
}
