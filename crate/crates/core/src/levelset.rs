//! Level-set functions whose zero set marks a boundary.
//!
//! The sign convention is negative inside the domain. Shifted level sets are
//! signed distances to an axis-aligned boundary line (`φ = x_axis − origin`);
//! their sign therefore depends on which side the boundary lies and they are
//! only used as scaled inputs to singular blocks.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::autodiff::{Jet2, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevelSet {
    /// `φ(p) = p[axis] − origin`.
    Shifted { axis: usize, origin: f64 },
    /// A circular band of mid-radius `radius` and half-thickness
    /// `half_width`, spanning `±half_angle` around the +y axis and closed by
    /// semicircular caps. `half_angle` must lie in `(0, π/2]`.
    CappedArc {
        radius: f64,
        half_width: f64,
        half_angle: f64,
    },
}

impl LevelSet {
    pub fn dim(&self) -> usize {
        match self {
            LevelSet::Shifted { axis, .. } => axis + 1,
            LevelSet::CappedArc { .. } => 2,
        }
    }

    pub fn phi<T: Scalar>(&self, p: &[T]) -> T {
        match *self {
            LevelSet::Shifted { axis, origin } => p[axis] - origin,
            LevelSet::CappedArc {
                radius,
                half_width,
                half_angle,
            } => {
                let (s, c) = half_angle.sin_cos();
                let (x, y) = (p[0], p[1]);
                if c * x.value().abs() > s * y.value() {
                    let dx = x.abs() - radius * s;
                    let dy = y - radius * c;
                    (dx * dx + dy * dy).sqrt() - half_width
                } else {
                    ((x * x + y * y).sqrt() - radius).abs() - half_width
                }
            }
        }
    }

    /// `(φ, ∂φ/∂x_a, ∂²φ/∂x_a²)` along coordinate axis `axis`.
    pub fn axis_jet(&self, p: &[f64], axis: usize) -> Jet2 {
        let mut seeded = [Jet2::default(); 2];
        for (k, v) in p.iter().enumerate() {
            seeded[k] = Jet2::seed(*v, if k == axis { 1.0 } else { 0.0 });
        }
        self.phi(&seeded[..p.len()])
    }

    pub fn gradient(&self, p: &[f64]) -> Vec<f64> {
        (0..p.len()).map(|a| self.axis_jet(p, a).d1).collect()
    }

    /// Total boundary length of a closed level set (CappedArc only).
    pub fn perimeter(&self) -> Option<f64> {
        match *self {
            LevelSet::Shifted { .. } => None,
            LevelSet::CappedArc {
                radius,
                half_width,
                half_angle,
            } => Some(4.0 * half_angle * radius + 2.0 * PI * half_width),
        }
    }

    /// Arc-length parametrization of the zero set, `t ∈ [0, 1)`.
    pub fn boundary_point(&self, t: f64) -> Option<[f64; 2]> {
        let LevelSet::CappedArc {
            radius,
            half_width,
            half_angle,
        } = *self
        else {
            return None;
        };
        let (s, c) = half_angle.sin_cos();
        let outer = radius + half_width;
        let inner = radius - half_width;
        let arc_outer = 2.0 * half_angle * outer;
        let arc_inner = 2.0 * half_angle * inner;
        let cap = PI * half_width;
        let mut l = t.rem_euclid(1.0) * self.perimeter()?;

        if l < arc_outer {
            let a = -half_angle + l / outer;
            return Some([outer * a.sin(), outer * a.cos()]);
        }
        l -= arc_outer;
        if l < cap {
            // right cap, from the outer arc end around to the inner arc end
            let psi = l / half_width;
            let (ur, tg) = ([s, c], [c, -s]);
            let centre = [radius * s, radius * c];
            return Some([
                centre[0] + half_width * (psi.cos() * ur[0] + psi.sin() * tg[0]),
                centre[1] + half_width * (psi.cos() * ur[1] + psi.sin() * tg[1]),
            ]);
        }
        l -= cap;
        if l < arc_inner {
            let a = half_angle - l / inner;
            return Some([inner * a.sin(), inner * a.cos()]);
        }
        l -= arc_inner;
        let psi = (l / half_width).min(PI);
        let (ur, tg) = ([-s, c], [-c, -s]);
        let centre = [-radius * s, radius * c];
        Some([
            centre[0] + half_width * (-psi.cos() * ur[0] + psi.sin() * tg[0]),
            centre[1] + half_width * (-psi.cos() * ur[1] + psi.sin() * tg[1]),
        ])
    }

    /// Axis-aligned box `[xmin, xmax, ymin, ymax]` containing `{φ < 0}`.
    pub fn bounding_box(&self) -> Option<[f64; 4]> {
        match *self {
            LevelSet::Shifted { .. } => None,
            LevelSet::CappedArc {
                radius,
                half_width,
                half_angle,
            } => {
                let (s, c) = half_angle.sin_cos();
                let xmax = radius * s + half_width;
                let ymin = (radius * c - half_width).min((radius - half_width) * c);
                Some([-xmax, xmax, ymin, radius + half_width])
            }
        }
    }
}
