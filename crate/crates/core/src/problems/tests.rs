use super::*;
use crate::autodiff::Jet2;
use crate::sampling::sample_boundary;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// u, ∇u, Δu of the closed form via one jet pass per axis.
fn exact_jet(spec: &ProblemSpec, p: &[f64], eps: f64) -> SolutionJet {
    let (n, d) = (spec.n_components, spec.dim());
    let mut jet = SolutionJet {
        dim: d,
        u: vec![0.0; n],
        grad_u: vec![0.0; n * d],
        lap: vec![0.0; n],
    };
    for a in 0..d {
        let x: Vec<Jet2> = p
            .iter()
            .enumerate()
            .map(|(i, v)| Jet2::seed(*v, if i == a { 1.0 } else { 0.0 }))
            .collect();
        for (k, j) in spec.exact_at(&x, eps).unwrap().iter().enumerate() {
            jet.u[k] = j.value;
            jet.grad_u[k * d + a] = j.d1;
            jet.lap[k] += j.d2;
        }
    }
    jet
}

fn random_interior(spec: &ProblemSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..spec.dim()).map(|_| rng.random_range(1e-9..1.0)).collect()
}

#[test]
fn ids_round_trip() {
    for id in ProblemId::ALL {
        assert_eq!(id.as_str().parse::<ProblemId>().unwrap(), id);
    }
    assert_eq!("EX3".parse::<ProblemId>().unwrap(), ProblemId::Ex3);
    assert_eq!(
        "ex8".parse::<ProblemId>().unwrap_err(),
        Error::UnknownProblem("ex8".into())
    );
    assert_eq!(registry().len(), 7);
    assert_eq!(lookup("ex6").unwrap().n_components, 2);
}

#[test]
fn closed_forms_satisfy_their_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for id in ProblemId::ALL.into_iter().filter(|id| *id != ProblemId::Ex7) {
        let spec = problem(id);
        for eps in [1e-1, 1e-2] {
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let p = random_interior(&spec, &mut rng);
                for r in spec.residual(&exact_jet(&spec, &p, eps), &p, eps) {
                    worst = worst.max(r.abs());
                }
            }
            assert!(worst <= 1e-7, "{id} eps={eps}: residual {worst:e}");
        }
    }
}

#[test]
fn zero_jets_solve_homogeneous_problems() {
    for id in [ProblemId::Ex2, ProblemId::Ex7] {
        let spec = problem(id);
        let jet = SolutionJet {
            dim: spec.dim(),
            u: vec![0.0],
            grad_u: vec![0.0; spec.dim()],
            lap: vec![0.0],
        };
        let p = vec![0.3; spec.dim()];
        assert_eq!(spec.residual(&jet, &p, 1e-3), vec![0.0]);
    }
}

#[test]
fn exact_solutions_meet_boundary_data() {
    let grid = [1e-1, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10];
    for id in ProblemId::ALL.into_iter().filter(|id| *id != ProblemId::Ex7) {
        let spec = problem(id);
        let pts = sample_boundary(&spec, 100, 3).unwrap();
        for eps in grid {
            for p in pts.iter() {
                let u = spec.exact_solution(p, eps).unwrap();
                let g = spec.boundary_value(p, eps);
                for (a, b) in u.iter().zip(&g) {
                    assert!((a - b).abs() <= 1e-10, "{id} eps={eps} at {p:?}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn reference_boundary_values() {
    let ex1 = problem(ProblemId::Ex1);
    for eps in [1e-2, 1e-10] {
        assert_eq!(ex1.exact_solution(&[0.0], eps).unwrap(), vec![0.0]);
        assert!((ex1.exact_solution(&[1.0], eps).unwrap()[0] - 1.0).abs() < 1e-15);
    }
    assert!(problem(ProblemId::Ex4).exact_solution(&[0.0, 0.0], 1e-3).unwrap()[0].abs() < 1e-15);
    let ex3 = problem(ProblemId::Ex3);
    for x in [0.0, 1.0] {
        for u in ex3.exact_solution(&[x], 1e-2).unwrap() {
            assert!(u.abs() < 1e-12, "{u}");
        }
    }
}

#[test]
fn reaction_diffusion_midpoint_regression() {
    // 50-digit evaluation of the closed form at x = 0.5, ε = 0.1
    let reference = 0.006_737_641_110_652_278_652_759_569_122_441_077_645_418_676_970_850_3;
    let u = problem(ProblemId::Ex2).exact_solution(&[0.5], 0.1).unwrap()[0];
    assert!((u - reference).abs() <= 1e-15 * reference, "{u:e}");
}

#[test]
fn poisson_boltzmann_has_no_exact_solution() {
    let ex7 = problem(ProblemId::Ex7);
    assert!(!ex7.has_exact());
    assert_eq!(
        ex7.exact_solution(&[0.0, 0.8], 1e-3).unwrap_err(),
        Error::NoExactSolution("ex7".into())
    );
    assert_eq!(ex7.boundary_value(&[0.0, 1.0], 1e-3), vec![1.0]);
}

#[test]
fn weights() {
    assert_eq!(problem(ProblemId::Ex1).weight(&[0.5]), 0.25);
    assert!((problem(ProblemId::Ex4).weight(&[0.1, 0.7]) - 0.01).abs() < 1e-16);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..50 {
        let x = rng.random_range(0.0..1.0);
        assert_eq!(problem(ProblemId::Ex2).weight(&[x]), 1.0);
        assert_eq!(problem(ProblemId::Ex7).weight(&[x, 0.8]), 1.0);
    }
    for id in [ProblemId::Ex1, ProblemId::Ex3] {
        assert_eq!(problem(id).weight(&[0.0]), 0.0);
        assert_eq!(problem(id).weight(&[1.0]), 0.0);
    }
    for id in [ProblemId::Ex4, ProblemId::Ex5, ProblemId::Ex6] {
        for p in [[0.0, 0.3], [1.0, 0.2], [0.5, 0.0], [0.7, 1.0]] {
            assert_eq!(problem(id).weight(&p), 0.0);
        }
    }
}

#[test]
fn level_set_reference_values() {
    let ex7 = problem(ProblemId::Ex7);
    let phi = |p: [f64; 2]| ex7.levelset_phi(&p).unwrap();
    assert!((phi([0.0, 0.0]) - 0.6).abs() < 1e-15);
    assert!((phi([0.0, 0.8]) + 0.2).abs() < 1e-15);
    assert!(phi([0.0, 1.0]).abs() < 1e-15);
    assert_eq!(problem(ProblemId::Ex4).levelset_phi(&[0.5, 0.5]), None);
}

#[test]
fn level_set_is_continuous_across_branch_line() {
    let ex7 = problem(ProblemId::Ex7);
    let theta = std::f64::consts::PI / 3.0;
    for r in [0.1, 0.5, 0.8, 1.2] {
        for sign in [-1.0, 1.0] {
            // cos θ |x| = sin θ y on the ray at angle θ from the y axis
            let p = [sign * r * theta.sin(), r * theta.cos()];
            let h = 1e-12;
            let inside = ex7.levelset_phi(&[p[0], p[1] + h]).unwrap();
            let outside = ex7.levelset_phi(&[p[0], p[1] - h]).unwrap();
            assert!((inside - outside).abs() <= 1e-9, "r={r}: {inside} vs {outside}");
        }
    }
}

#[test]
fn architecture_defaults() {
    assert_eq!(problem(ProblemId::Ex6).default_hidden(), 35);
    assert_eq!(problem(ProblemId::Ex1).default_hidden(), 50);
    assert_eq!(
        problem(ProblemId::Ex7).geometry(true),
        Geometry::TwoDIrregular { full_inputs: true }
    );
    assert_eq!(problem(ProblemId::Ex3).geometry(false), Geometry::OneD);
    assert_eq!(problem(ProblemId::Ex4).domain.model_level_sets().len(), 4);
}
