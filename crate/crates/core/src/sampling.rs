//! Collocation and test point generation.
//!
//! Interior points are uniform over Ω. Layer points are drawn from normal
//! distributions centred on each boundary segment with standard deviation
//! `σ_std` (default ε); draws that leave Ω are discarded and redrawn, so the
//! requested counts are always met exactly. Every boundary segment receives
//! layer points whether or not the solution has a layer there.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::problems::{Domain, ProblemSpec, SamplingCounts};

/// Upper bound on draws per side before sampling gives up.
pub const REJECTION_BUDGET: usize = 1_000_000;

/// Stream used for test sets, so they never share draws with training sets.
const TEST_STREAM: u64 = 1;

/// A flat list of points of fixed dimension.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Points {
    dim: usize,
    coords: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::Shape(format!(
                "{} coordinates do not form {dim}-D points",
                coords.len()
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.coords.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn push(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.dim);
        self.coords.extend_from_slice(p);
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim.max(1))
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSet {
    pub interior: Points,
    pub layer: Points,
    pub boundary: Points,
    pub sigma_std: f64,
}

impl CollocationSet {
    /// Number of residual points (interior plus layer).
    pub fn m(&self) -> usize {
        self.interior.len() + self.layer.len()
    }

    pub fn m_b(&self) -> usize {
        self.boundary.len()
    }

    /// Interior then layer points, tagged with their kind and index.
    pub fn interior_points(&self) -> impl Iterator<Item = (&'static str, usize, &[f64])> + '_ {
        let a = self.interior.iter().enumerate().map(|(i, p)| ("interior", i, p));
        let b = self.layer.iter().enumerate().map(|(i, p)| ("layer", i, p));
        a.chain(b)
    }

    /// One point per line: coordinates, then `interior`, `layer` or `boundary`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let dim = self.interior.dim().max(self.boundary.dim());
        let names = ["x", "y"];
        writeln!(w, "{},tag", names[..dim].join(","))?;
        for (tag, pts) in [
            ("interior", &self.interior),
            ("layer", &self.layer),
            ("boundary", &self.boundary),
        ] {
            for p in pts.iter() {
                for c in p {
                    write!(w, "{c},")?;
                }
                writeln!(w, "{tag}")?;
            }
        }
        Ok(())
    }
}

fn check_counts(counts: &SamplingCounts) -> Result<()> {
    if counts.interior == 0 || counts.layer_per_side == 0 || counts.boundary == 0 {
        return Err(Error::InvalidCounts(format!(
            "all counts must be positive, got {counts:?}"
        )));
    }
    Ok(())
}

/// Draws from `draw` until `accept` holds, within [`REJECTION_BUDGET`].
fn rejection<R: Rng, const D: usize>(
    rng: &mut R,
    side: &str,
    mut draw: impl FnMut(&mut R) -> [f64; D],
    accept: impl Fn(&[f64]) -> bool,
) -> Result<[f64; D]> {
    for _ in 0..REJECTION_BUDGET {
        let p = draw(rng);
        if accept(&p) {
            return Ok(p);
        }
    }
    Err(Error::RejectionBudget {
        side: side.to_string(),
        draws: REJECTION_BUDGET,
    })
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn sample_interior<R: Rng>(domain: &Domain, count: usize, rng: &mut R) -> Result<Points> {
    let mut pts = Points::new(domain.dim());
    for _ in 0..count {
        match *domain {
            Domain::Interval { a, b } => {
                let p = rejection(
                    rng,
                    "interior",
                    |r| [a + (b - a) * r.random::<f64>()],
                    |p| domain.contains(p),
                )?;
                pts.push(&p);
            }
            Domain::Rectangle { a, b, c, d } => {
                let p = rejection(
                    rng,
                    "interior",
                    |r| [a + (b - a) * r.random::<f64>(), c + (d - c) * r.random::<f64>()],
                    |p| domain.contains(p),
                )?;
                pts.push(&p);
            }
            Domain::LevelSet { bbox, .. } => {
                let [x0, x1, y0, y1] = bbox;
                let p = rejection(
                    rng,
                    "interior",
                    |r| [x0 + (x1 - x0) * r.random::<f64>(), y0 + (y1 - y0) * r.random::<f64>()],
                    |p| domain.contains(p),
                )?;
                pts.push(&p);
            }
        }
    }
    Ok(pts)
}

fn sample_layer<R: Rng>(domain: &Domain, per_side: usize, sigma: f64, rng: &mut R) -> Result<Points> {
    let mut pts = Points::new(domain.dim());
    let inside = |p: &[f64]| domain.contains(p);
    match *domain {
        Domain::Interval { a, b } => {
            for (side, centre) in [("left", a), ("right", b)] {
                for _ in 0..per_side {
                    pts.push(&rejection(rng, side, |r| [centre + sigma * normal(r)], inside)?);
                }
            }
        }
        Domain::Rectangle { a, b, c, d } => {
            // (name, normal axis, centre, tangential range)
            let sides = [
                ("left", 0, a, (c, d)),
                ("right", 0, b, (c, d)),
                ("bottom", 1, c, (a, b)),
                ("top", 1, d, (a, b)),
            ];
            for (side, axis, centre, (lo, hi)) in sides {
                for _ in 0..per_side {
                    let p = rejection(
                        rng,
                        side,
                        |r| {
                            let t = lo + (hi - lo) * r.random::<f64>();
                            let s = centre + sigma * normal(r);
                            if axis == 0 {
                                [s, t]
                            } else {
                                [t, s]
                            }
                        },
                        inside,
                    )?;
                    pts.push(&p);
                }
            }
        }
        Domain::LevelSet { level_set, .. } => {
            if level_set.perimeter().is_none() {
                return Err(Error::InvalidCounts(
                    "level-set domain needs a closed boundary parametrization".into(),
                ));
            }
            for _ in 0..per_side {
                let p = rejection(
                    rng,
                    "boundary tube",
                    |r| {
                        let q = level_set.boundary_point(r.random::<f64>()).unwrap();
                        let g = level_set.gradient(&q);
                        let norm = g[0].hypot(g[1]);
                        let s = sigma * normal(r);
                        [q[0] - s * g[0] / norm, q[1] - s * g[1] / norm]
                    },
                    inside,
                )?;
                pts.push(&p);
            }
        }
    }
    Ok(pts)
}

fn draw_boundary<R: Rng>(domain: &Domain, count: usize, rng: &mut R) -> Points {
    let mut pts = Points::new(domain.dim());
    match *domain {
        Domain::Interval { a, b } => {
            pts.push(&[a]);
            pts.push(&[b]);
        }
        Domain::Rectangle { a, b, c, d } => {
            let (w, h) = (b - a, d - c);
            let perimeter = 2.0 * (w + h);
            for _ in 0..count {
                let t = perimeter * rng.random::<f64>();
                let p = if t < w {
                    [a + t, c]
                } else if t < w + h {
                    [b, c + (t - w)]
                } else if t < 2.0 * w + h {
                    [b - (t - w - h), d]
                } else {
                    [a, d - (t - 2.0 * w - h)]
                };
                pts.push(&p);
            }
        }
        Domain::LevelSet { level_set, .. } => {
            for _ in 0..count {
                pts.push(&level_set.boundary_point(rng.random::<f64>()).expect("closed level set"));
            }
        }
    }
    pts
}

/// Boundary points: both endpoints in 1D, otherwise `count` points uniform in
/// arc length.
pub fn sample_boundary(problem: &ProblemSpec, count: usize, seed: u64) -> Result<Points> {
    if count == 0 {
        return Err(Error::InvalidCounts("boundary count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw_boundary(&problem.domain, count, &mut rng))
}

fn sample_with_rng(
    problem: &ProblemSpec,
    counts: &SamplingCounts,
    sigma_std: f64,
    rng: &mut ChaCha8Rng,
) -> Result<CollocationSet> {
    check_counts(counts)?;
    if !(sigma_std > 0.0 && sigma_std.is_finite()) {
        return Err(Error::InvalidCounts(format!(
            "sigma_std must be positive, got {sigma_std}"
        )));
    }
    let interior = sample_interior(&problem.domain, counts.interior, rng)?;
    let layer = sample_layer(&problem.domain, counts.layer_per_side, sigma_std, rng)?;
    let boundary = draw_boundary(&problem.domain, counts.boundary, rng);
    Ok(CollocationSet {
        interior,
        layer,
        boundary,
        sigma_std,
    })
}

/// Training set with `σ_std = sigma_scale · ε`.
pub fn sample_collocation_scaled(
    problem: &ProblemSpec,
    epsilon: f64,
    counts: &SamplingCounts,
    sigma_scale: f64,
    seed: u64,
) -> Result<CollocationSet> {
    crate::network::check_epsilon(epsilon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with_rng(problem, counts, sigma_scale * epsilon, &mut rng)
}

pub fn sample_collocation(
    problem: &ProblemSpec,
    epsilon: f64,
    counts: &SamplingCounts,
    seed: u64,
) -> Result<CollocationSet> {
    sample_collocation_scaled(problem, epsilon, counts, 1.0, seed)
}

/// Test set with every count doubled, drawn from a separate stream of the
/// same seed.
pub fn sample_test_set(
    problem: &ProblemSpec,
    epsilon: f64,
    train_counts: &SamplingCounts,
    seed: u64,
) -> Result<CollocationSet> {
    crate::network::check_epsilon(epsilon)?;
    let doubled = SamplingCounts {
        interior: 2 * train_counts.interior,
        layer_per_side: 2 * train_counts.layer_per_side,
        boundary: 2 * train_counts.boundary,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(TEST_STREAM);
    sample_with_rng(problem, &doubled, epsilon, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{problem, ProblemId};
    use std::f64::consts::PI;

    #[test]
    fn default_counts_match_reference_setups() {
        let ex1 = problem(ProblemId::Ex1);
        let c = sample_collocation(&ex1, 1e-2, &ex1.default_counts(), 0).unwrap();
        assert_eq!((c.interior.len(), c.layer.len(), c.m(), c.m_b()), (500, 1000, 1500, 2));
        assert_eq!(c.boundary.as_flat(), &[0.0, 1.0]);

        let ex4 = problem(ProblemId::Ex4);
        let c = sample_collocation(&ex4, 1e-4, &ex4.default_counts(), 0).unwrap();
        assert_eq!((c.m(), c.m_b()), (2500, 880));

        let ex7 = problem(ProblemId::Ex7);
        let c = sample_collocation(&ex7, 1e-10, &ex7.default_counts(), 0).unwrap();
        assert_eq!((c.m(), c.m_b()), (2500, 220));
    }

    #[test]
    fn test_sets_double_the_counts() {
        let ex1 = problem(ProblemId::Ex1);
        let t = sample_test_set(&ex1, 1e-2, &ex1.default_counts(), 0).unwrap();
        assert_eq!(t.m(), 3000);
        let ex4 = problem(ProblemId::Ex4);
        let t = sample_test_set(&ex4, 1e-2, &ex4.default_counts(), 0).unwrap();
        assert_eq!(t.m(), 5000);
    }

    #[test]
    fn test_set_is_disjoint_from_training_set() {
        let ex4 = problem(ProblemId::Ex4);
        let counts = ex4.default_counts();
        let train = sample_collocation(&ex4, 1e-3, &counts, 9).unwrap();
        let test = sample_test_set(&ex4, 1e-3, &counts, 9).unwrap();
        for p in train.interior.iter().chain(train.layer.iter()) {
            assert!(test.interior.iter().chain(test.layer.iter()).all(|q| q != p));
        }
    }

    #[test]
    fn left_layer_concentrates_within_three_sigma() {
        let ex1 = problem(ProblemId::Ex1);
        let c = sample_collocation(&ex1, 1e-6, &ex1.default_counts(), 4).unwrap();
        let left: Vec<f64> = c.layer.iter().take(500).map(|p| p[0]).collect();
        let near = left.iter().filter(|x| **x <= 3e-6).count();
        assert!(near as f64 >= 0.99 * 500.0, "{near}");
        assert!(left.iter().all(|x| *x > 0.0));
    }

    #[test]
    fn points_are_strictly_inside() {
        for id in ProblemId::ALL {
            let p = problem(id);
            for eps in [1e-1, 1e-4, 1e-10] {
                let c = sample_collocation(&p, eps, &p.default_counts(), 17).unwrap();
                for q in c.interior.iter().chain(c.layer.iter()) {
                    assert!(p.domain.contains(q), "{id} eps={eps} {q:?}");
                }
            }
        }
    }

    #[test]
    fn boundary_points_lie_on_the_boundary() {
        for id in ProblemId::ALL {
            let p = problem(id);
            let b = sample_boundary(&p, 300, 2).unwrap();
            for q in b.iter() {
                let on = match p.domain {
                    Domain::LevelSet { level_set, .. } => level_set.phi(q).abs() <= 1e-12,
                    _ => p.domain.boundary_distance(q) == 0.0,
                };
                assert!(on, "{id} {q:?}");
            }
        }
    }

    #[test]
    fn irregular_boundary_is_uniform_in_arc_length() {
        // the outer arc has radius 1 and spans 2π/3
        let ex7 = problem(ProblemId::Ex7);
        let b = sample_boundary(&ex7, 20_000, 5).unwrap();
        let outer = b.iter().filter(|p| (p[0].hypot(p[1]) - 1.0).abs() < 1e-9).count();
        let expected = (2.0 * PI / 3.0) / (16.0 * PI / 15.0 + 0.4 * PI);
        let frac = outer as f64 / b.len() as f64;
        assert!((frac - expected).abs() < 0.015, "{frac} vs {expected}");
    }

    #[test]
    fn every_rectangle_side_gets_layer_points() {
        let ex5 = problem(ProblemId::Ex5);
        let c = sample_collocation(&ex5, 1e-3, &ex5.default_counts(), 1).unwrap();
        let sides: [fn(&[f64]) -> f64; 4] = [|p| p[0], |p| 1.0 - p[0], |p| p[1], |p| 1.0 - p[1]];
        for (s, dist) in sides.iter().enumerate() {
            let chunk: Vec<&[f64]> = c.layer.iter().skip(500 * s).take(500).collect();
            assert!(chunk.iter().all(|p| dist(p) < 0.01), "side {s}");
        }
    }

    #[test]
    fn identical_seeds_give_identical_sets() {
        let ex7 = problem(ProblemId::Ex7);
        let a = sample_collocation(&ex7, 1e-3, &ex7.default_counts(), 5).unwrap();
        let b = sample_collocation(&ex7, 1e-3, &ex7.default_counts(), 5).unwrap();
        assert_eq!(a, b);
        let c = sample_collocation(&ex7, 1e-3, &ex7.default_counts(), 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_counts_are_rejected() {
        let ex2 = problem(ProblemId::Ex2);
        let counts = SamplingCounts {
            interior: 0,
            layer_per_side: 5,
            boundary: 2,
        };
        assert!(matches!(
            sample_collocation(&ex2, 0.1, &counts, 0),
            Err(Error::InvalidCounts(_))
        ));
        assert!(sample_collocation(&ex2, -1.0, &ex2.default_counts(), 0).is_err());
    }

    #[test]
    fn csv_export_tags_points() {
        let ex2 = problem(ProblemId::Ex2);
        let counts = SamplingCounts {
            interior: 2,
            layer_per_side: 1,
            boundary: 2,
        };
        let c = sample_collocation(&ex2, 0.1, &counts, 0).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,tag");
        assert_eq!(lines.len(), 1 + 2 + 2 + 2);
        assert!(lines[1].ends_with(",interior") && lines[3].ends_with(",layer") && lines[6] == "1,boundary");
    }
}
