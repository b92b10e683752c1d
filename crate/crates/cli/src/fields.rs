//! Solution fields on plotting grids.
//!
//! Two kinds of grid: a uniform one over Ω, and per boundary side a grid whose
//! normal offsets run geometrically from 1e-3·ε to 10ε (plus the boundary
//! itself), so a layer of any width is resolved.

use std::io::{self, Write};

use blpinn::network::SolutionModel;
use blpinn::problems::{Domain, ProblemSpec};
use blpinn::sampling::Points;

/// `0` followed by `n − 1` offsets spaced geometrically over `[1e-3·ε, 10ε]`.
pub fn layer_offsets(eps: f64, n: usize) -> Vec<f64> {
    let (lo, hi) = (1e-3 * eps, 10.0 * eps);
    let steps = (n - 1).max(2) - 1;
    let mut d = vec![0.0];
    d.extend((0..n - 1).map(|k| lo * (hi / lo).powf(k as f64 / steps as f64)));
    d
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| {
        if k + 1 == n {
            b
        } else {
            a + (b - a) * k as f64 / (n - 1) as f64
        }
    })
}

/// `n1` points in 1D, `n2 × n2` in 2D; irregular domains keep the grid points
/// inside Ω.
pub fn uniform_grid(spec: &ProblemSpec, n1: usize, n2: usize) -> Points {
    let mut pts = Points::new(spec.dim());
    match spec.domain {
        Domain::Interval { a, b } => linspace(a, b, n1).for_each(|x| pts.push(&[x])),
        Domain::Rectangle { a, b, c, d } => {
            for y in linspace(c, d, n2) {
                for x in linspace(a, b, n2) {
                    pts.push(&[x, y]);
                }
            }
        }
        Domain::LevelSet { bbox, .. } => {
            for y in linspace(bbox[2], bbox[3], n2) {
                for x in linspace(bbox[0], bbox[1], n2) {
                    if spec.domain.contains(&[x, y]) {
                        pts.push(&[x, y]);
                    }
                }
            }
        }
    }
    pts
}

/// Named layer grids, one per boundary side. In 2D each grid is
/// `n2` tangential positions times `n2` normal offsets.
pub fn layer_grids(spec: &ProblemSpec, eps: f64, n1: usize, n2: usize) -> Vec<(&'static str, Points)> {
    match spec.domain {
        Domain::Interval { a, b } => {
            let d = layer_offsets(eps, n1);
            let side = |f: &dyn Fn(f64) -> f64| {
                let mut p = Points::new(1);
                d.iter().for_each(|o| p.push(&[f(*o)]));
                p
            };
            vec![("L", side(&|o| a + o)), ("R", side(&|o| b - o))]
        }
        Domain::Rectangle { a, b, c, d: top } => {
            let d = layer_offsets(eps, n2);
            let side = |f: &dyn Fn(f64, f64) -> [f64; 2], lo: f64, hi: f64| {
                let mut p = Points::new(2);
                for t in linspace(lo, hi, n2) {
                    d.iter().for_each(|o| p.push(&f(t, *o)));
                }
                p
            };
            vec![
                ("L", side(&|t, o| [a + o, t], c, top)),
                ("R", side(&|t, o| [b - o, t], c, top)),
                ("B", side(&|t, o| [t, c + o], a, b)),
                ("T", side(&|t, o| [t, top - o], a, b)),
            ]
        }
        Domain::LevelSet { level_set, .. } => {
            let d = layer_offsets(eps, n2);
            let mut p = Points::new(2);
            for k in 0..n2 {
                let Some(q) = level_set.boundary_point(k as f64 / n2 as f64) else {
                    break;
                };
                let g = level_set.gradient(&q);
                let norm = g[0].hypot(g[1]);
                for o in &d {
                    let x = [q[0] - o * g[0] / norm, q[1] - o * g[1] / norm];
                    // offset 0 is on the boundary itself; keep it for plotting
                    if *o == 0.0 || spec.domain.contains(&x) {
                        p.push(&x);
                    }
                }
            }
            vec![("boundary", p)]
        }
    }
}

/// Columns `x[,y],component,u_pred,u_exact,abs_err`; the last two are empty
/// when the problem has no closed form.
pub fn write_field<W: Write>(
    mut w: W,
    header: &str,
    spec: &ProblemSpec,
    model: &SolutionModel,
    pts: &Points,
) -> io::Result<()> {
    let eps = model.epsilon();
    writeln!(w, "{header}")?;
    let coords = if spec.dim() == 1 { "x" } else { "x,y" };
    writeln!(w, "{coords},component,u_pred,u_exact,abs_err")?;
    for p in pts.iter() {
        let u = model.forward(p).map_err(io::Error::other)?;
        let exact = spec.exact_solution(p, eps).ok();
        for (k, uk) in u.iter().enumerate() {
            for c in p {
                write!(w, "{c:e},")?;
            }
            match &exact {
                Some(e) => writeln!(w, "{k},{uk:e},{:e},{:e}", e[k], (uk - e[k]).abs())?,
                None => writeln!(w, "{k},{uk:e},,")?,
            }
        }
    }
    Ok(())
}
