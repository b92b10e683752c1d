//! Benchmark problem registry.
//!
//! | id  | equation                                         | n | domain            | weight |
//! |-----|--------------------------------------------------|---|-------------------|--------|
//! | ex1 | `−εu'' − (1+ε)u' − u = 0`                        | 1 | `[0,1]`           | dist²  |
//! | ex2 | `−ε²u'' + u = 0`                                 | 1 | `[0,1]`           | 1      |
//! | ex3 | `−εu'' − M u' = (2x+2, 4)`                       | 2 | `[0,1]`           | dist²  |
//! | ex4 | `−εΔu + a·∇u + u = f`                            | 1 | `[0,1]²`          | dist²  |
//! | ex5 | `−εΔu + u_y/(1+y) = (1/(1+y) − 2ε)e^{y−x}`       | 1 | `[0,1]²`          | dist²  |
//! | ex6 | `−εΔu − A u_x − B u_y = f`                       | 2 | `[0,1]²`          | dist²  |
//! | ex7 | `−ε²Δu + e^u − e^{−u} = 0`, `u = 1` on the boundary | 1 | capped arc band | 1      |

pub mod closed_form;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::autodiff::{Scalar, SolutionJet};
use crate::error::{Error, Result};
use crate::levelset::LevelSet;
use crate::network::Geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemId {
    Ex1,
    Ex2,
    Ex3,
    Ex4,
    Ex5,
    Ex6,
    Ex7,
}

impl ProblemId {
    pub const ALL: [ProblemId; 7] = [
        ProblemId::Ex1,
        ProblemId::Ex2,
        ProblemId::Ex3,
        ProblemId::Ex4,
        ProblemId::Ex5,
        ProblemId::Ex6,
        ProblemId::Ex7,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemId::Ex1 => "ex1",
            ProblemId::Ex2 => "ex2",
            ProblemId::Ex3 => "ex3",
            ProblemId::Ex4 => "ex4",
            ProblemId::Ex5 => "ex5",
            ProblemId::Ex6 => "ex6",
            ProblemId::Ex7 => "ex7",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval {
        a: f64,
        b: f64,
    },
    Rectangle {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
    /// `Ω = {φ < 0}` inside `bbox = [xmin, xmax, ymin, ymax]`.
    LevelSet {
        level_set: LevelSet,
        bbox: [f64; 4],
    },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    /// Number of boundary segments that receive their own layer points.
    pub fn sides(&self) -> usize {
        match self {
            Domain::Interval { .. } => 2,
            Domain::Rectangle { .. } => 4,
            Domain::LevelSet { .. } => 1,
        }
    }

    /// Strict interior test; level-set domains require `φ < −1e-14`.
    pub fn contains(&self, p: &[f64]) -> bool {
        match *self {
            Domain::Interval { a, b } => p[0] > a && p[0] < b,
            Domain::Rectangle { a, b, c, d } => p[0] > a && p[0] < b && p[1] > c && p[1] < d,
            Domain::LevelSet { level_set, .. } => level_set.phi(p) < -1e-14,
        }
    }

    /// Distance from `p ∈ Ω` to the nearest boundary (rectangles and intervals).
    pub fn boundary_distance(&self, p: &[f64]) -> f64 {
        match *self {
            Domain::Interval { a, b } => (p[0] - a).min(b - p[0]),
            Domain::Rectangle { a, b, c, d } => (p[0] - a).min(b - p[0]).min(p[1] - c).min(d - p[1]),
            Domain::LevelSet { level_set, .. } => -level_set.phi(p),
        }
    }

    /// Level sets handed to the singular blocks of the network.
    pub fn model_level_sets(&self) -> Vec<LevelSet> {
        let s = |axis, origin| LevelSet::Shifted { axis, origin };
        match *self {
            Domain::Interval { a, b } => vec![s(0, a), s(0, b)],
            Domain::Rectangle { a, b, c, d } => vec![s(0, a), s(0, b), s(1, c), s(1, d)],
            Domain::LevelSet { level_set, .. } => vec![level_set],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// Squared distance to the boundary: `O(ε²)` inside layers.
    DistanceSquared,
    Unit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub id: ProblemId,
    pub n_components: usize,
    pub domain: Domain,
    pub weight_kind: WeightKind,
    pub description: &'static str,
}

/// Default sample sizes for one problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingCounts {
    pub interior: usize,
    pub layer_per_side: usize,
    pub boundary: usize,
}

pub const EX7_LEVEL_SET: LevelSet = LevelSet::CappedArc {
    radius: 0.8,
    half_width: 0.2,
    half_angle: PI / 3.0,
};

pub fn problem(id: ProblemId) -> ProblemSpec {
    let unit = Domain::Interval { a: 0.0, b: 1.0 };
    let square = Domain::Rectangle {
        a: 0.0,
        b: 1.0,
        c: 0.0,
        d: 1.0,
    };
    let (n, domain, weight_kind, description) = match id {
        ProblemId::Ex1 => (1, unit, WeightKind::DistanceSquared, "1D convection-diffusion-reaction"),
        ProblemId::Ex2 => (1, unit, WeightKind::Unit, "1D reaction-diffusion"),
        ProblemId::Ex3 => (
            2,
            unit,
            WeightKind::DistanceSquared,
            "1D coupled convection-diffusion system",
        ),
        ProblemId::Ex4 => (
            1,
            square,
            WeightKind::DistanceSquared,
            "2D convection-diffusion-reaction",
        ),
        ProblemId::Ex5 => (
            1,
            square,
            WeightKind::DistanceSquared,
            "2D variable-coefficient convection-diffusion",
        ),
        ProblemId::Ex6 => (
            2,
            square,
            WeightKind::DistanceSquared,
            "2D coupled convection-diffusion system",
        ),
        ProblemId::Ex7 => (
            1,
            Domain::LevelSet {
                level_set: EX7_LEVEL_SET,
                bbox: EX7_LEVEL_SET.bounding_box().unwrap(),
            },
            WeightKind::Unit,
            "2D Poisson-Boltzmann on a curved band",
        ),
    };
    ProblemSpec {
        id,
        n_components: n,
        domain,
        weight_kind,
        description,
    }
}

pub fn registry() -> Vec<ProblemSpec> {
    ProblemId::ALL.into_iter().map(problem).collect()
}

pub fn lookup(id: &str) -> Result<ProblemSpec> {
    Ok(problem(id.parse()?))
}

impl ProblemSpec {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn has_exact(&self) -> bool {
        self.id != ProblemId::Ex7
    }

    pub fn geometry(&self, irregular_full_inputs: bool) -> Geometry {
        match self.domain {
            Domain::Interval { .. } => Geometry::OneD,
            Domain::Rectangle { .. } => Geometry::TwoDRegular,
            Domain::LevelSet { .. } => Geometry::TwoDIrregular {
                full_inputs: irregular_full_inputs,
            },
        }
    }

    pub fn default_hidden(&self) -> usize {
        match self.id {
            ProblemId::Ex6 | ProblemId::Ex7 => 35,
            _ => 50,
        }
    }

    pub fn default_counts(&self) -> SamplingCounts {
        match self.domain {
            Domain::Interval { .. } => SamplingCounts {
                interior: 500,
                layer_per_side: 500,
                boundary: 2,
            },
            Domain::Rectangle { .. } => SamplingCounts {
                interior: 500,
                layer_per_side: 500,
                boundary: 880,
            },
            Domain::LevelSet { .. } => SamplingCounts {
                interior: 500,
                layer_per_side: 2000,
                boundary: 220,
            },
        }
    }

    /// `L_ε(u) − f` at `point`, one entry per component.
    pub fn residual<T: Scalar>(&self, jet: &SolutionJet<T>, point: &[f64], eps: f64) -> Vec<T> {
        let u = &jet.u;
        let lap = &jet.lap;
        let g = |k: usize, a: usize| jet.grad(k, a);
        match self.id {
            ProblemId::Ex1 => vec![-(lap[0] * eps) - g(0, 0) * (1.0 + eps) - u[0]],
            ProblemId::Ex2 => vec![-(lap[0] * (eps * eps)) + u[0]],
            ProblemId::Ex3 => {
                let x = point[0];
                let (d1, d2) = (g(0, 0), g(1, 0));
                vec![
                    -(lap[0] * eps) - (d1 * 3.0 - d2) - (2.0 * x + 2.0),
                    -(lap[1] * eps) - (d1 * 4.0 - d2) - 4.0,
                ]
            }
            ProblemId::Ex4 => {
                let [a1, a2] = closed_form::EX4_VELOCITY;
                let f = closed_form::ex4_source(point[0], point[1], eps);
                vec![-(lap[0] * eps) + g(0, 0) * a1 + g(0, 1) * a2 + u[0] - f]
            }
            ProblemId::Ex5 => {
                let y = point[1];
                let f = closed_form::ex5_source(point[0], y, eps);
                vec![-(lap[0] * eps) + g(0, 1) * (1.0 / (1.0 + y)) - f]
            }
            ProblemId::Ex6 => {
                let (a, b) = (closed_form::EX6_A, closed_form::EX6_B);
                let f = closed_form::ex6_source(point[0], point[1], eps);
                (0..2)
                    .map(|k| {
                        let mut r = -(lap[k] * eps) - f[k];
                        for l in 0..2 {
                            r = r - g(l, 0) * a[k][l] - g(l, 1) * b[k][l];
                        }
                        r
                    })
                    .collect()
            }
            ProblemId::Ex7 => vec![-(lap[0] * (eps * eps)) + u[0].exp() - (-u[0]).exp()],
        }
    }

    /// Closed-form solution evaluated on any scalar type.
    pub fn exact_at<T: Scalar>(&self, p: &[T], eps: f64) -> Result<Vec<T>> {
        use closed_form as cf;
        Ok(match self.id {
            ProblemId::Ex1 => vec![cf::ex1(p[0], eps)],
            ProblemId::Ex2 => vec![cf::ex2(p[0], eps)],
            ProblemId::Ex3 => cf::ex3(p[0], eps).to_vec(),
            ProblemId::Ex4 => vec![cf::ex4(p[0], p[1], eps)],
            ProblemId::Ex5 => vec![cf::ex5(p[0], p[1], eps)],
            ProblemId::Ex6 => cf::ex6(p[0], p[1], eps).to_vec(),
            ProblemId::Ex7 => return Err(Error::NoExactSolution(self.id.to_string())),
        })
    }

    pub fn exact_solution(&self, point: &[f64], eps: f64) -> Result<Vec<f64>> {
        self.exact_at(point, eps)
    }

    /// Dirichlet data `g` on the boundary.
    pub fn boundary_value(&self, point: &[f64], eps: f64) -> Vec<f64> {
        match self.id {
            // u(0) = 0, u(1) = 1
            ProblemId::Ex1 | ProblemId::Ex2 => vec![if point[0] > 0.5 { 1.0 } else { 0.0 }],
            ProblemId::Ex3 | ProblemId::Ex6 => vec![0.0; 2],
            ProblemId::Ex4 => vec![0.0],
            ProblemId::Ex5 => vec![closed_form::ex5(point[0], point[1], eps)],
            ProblemId::Ex7 => vec![1.0],
        }
    }

    pub fn weight(&self, point: &[f64]) -> f64 {
        match self.weight_kind {
            WeightKind::Unit => 1.0,
            WeightKind::DistanceSquared => {
                let d = self.domain.boundary_distance(point);
                d * d
            }
        }
    }

    /// The domain level set, for level-set domains.
    pub fn levelset_phi(&self, point: &[f64]) -> Option<f64> {
        match self.domain {
            Domain::LevelSet { level_set, .. } => Some(level_set.phi(point)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests;
