use super::*;
use crate::network::{build_model, InitConfig};
use crate::problems::{problem, ProblemId, SamplingCounts};
use crate::sampling::sample_collocation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `r(θ) = Aθ − b` with `A` stored row-major.
struct Affine {
    a: Vec<f64>,
    b: Vec<f64>,
    theta: Vec<f64>,
}

impl Affine {
    fn random(rows: usize, cols: usize, consistent: bool, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = if consistent {
            let star: Vec<f64> = (0..cols).map(|_| rng.random_range(-2.0..2.0)).collect();
            (0..rows)
                .map(|i| (0..cols).map(|j| a[i * cols + j] * star[j]).sum())
                .collect()
        } else {
            (0..rows).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        Self {
            a,
            b,
            theta: vec![0.0; cols],
        }
    }

    fn jac(&self) -> ResidualJacobian {
        ResidualJacobian {
            rows: self.b.len(),
            cols: self.theta.len(),
            data: self.a.clone(),
            residual: self.residual().unwrap(),
        }
    }

    /// Least-squares solution by Householder QR, independent of the normal
    /// equations used by the optimizer.
    fn lstsq(&self) -> Vec<f64> {
        use faer::linalg::solvers::SolveLstsq;
        let (m, n) = (self.b.len(), self.theta.len());
        let a = Mat::<f64>::from_fn(m, n, |i, j| self.a[i * n + j]);
        let mut rhs = Mat::<f64>::from_fn(m, 1, |i, _| self.b[i]);
        a.qr().solve_lstsq_in_place(rhs.as_mut());
        (0..n).map(|i| rhs[(i, 0)]).collect()
    }
}

impl LeastSquares for Affine {
    fn params(&self) -> Vec<f64> {
        self.theta.clone()
    }
    fn set_params(&mut self, theta: &[f64]) -> Result<()> {
        self.theta = theta.to_vec();
        Ok(())
    }
    fn residual(&self) -> Result<Vec<f64>> {
        let n = self.theta.len();
        Ok(self
            .b
            .iter()
            .enumerate()
            .map(|(i, bi)| (0..n).map(|j| self.a[i * n + j] * self.theta[j]).sum::<f64>() - bi)
            .collect())
    }
    fn residual_jacobian(&self) -> Result<ResidualJacobian> {
        Ok(self.jac())
    }
}

#[test]
fn undamped_step_solves_linear_least_squares() {
    let obj = Affine::random(40, 9, false, 3);
    let step = lm_step(&obj.theta, &obj.jac(), 0.0).unwrap();
    let oracle = obj.lstsq();
    for (a, b) in step.candidate.iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{a} vs {b}");
    }
    assert!(step.predicted_reduction > 0.0);
}

#[test]
fn identity_jacobian_halves_the_step() {
    let jac = ResidualJacobian {
        rows: 3,
        cols: 3,
        data: vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        residual: vec![1.0, 0.0, 0.0],
    };
    let step = lm_step(&[0.0; 3], &jac, 1.0).unwrap();
    assert!((step.delta[0] + 0.5).abs() <= 1e-15);
    assert_eq!(&step.delta[1..], &[0.0, 0.0]);
    // ‖e₁‖² − ‖e₁/2‖²
    assert!((step.predicted_reduction - 0.75).abs() < 1e-15);
}

#[test]
fn heavy_damping_shrinks_towards_gradient_step() {
    let obj = Affine::random(25, 6, false, 8);
    let jac = obj.jac();
    let ne = NormalEquations::new(&jac).unwrap();
    let g = ne.gradient().iter().map(|v| v * v).sum::<f64>().sqrt();
    for lambda in [1e2, 1e4, 1e8] {
        let d = lm_step(&obj.theta, &jac, lambda).unwrap().delta;
        let nd = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(nd <= g / lambda * (1.0 + 1e-12), "λ={lambda}");
    }
}

#[test]
fn shape_mismatch_is_reported() {
    let obj = Affine::random(5, 3, false, 0);
    assert!(matches!(lm_step(&[0.0; 2], &obj.jac(), 1.0), Err(Error::Shape(_))));
}

#[test]
fn affine_problems_converge_in_five_iterations() {
    for seed in 0..5 {
        let mut obj = Affine::random(60, 12, true, seed);
        let oracle = obj.lstsq();
        let cfg = LmConfig {
            max_iters: 5,
            loss_tol: 1e-28,
            ..LmConfig::default()
        };
        let report = minimize(&mut obj, &cfg).unwrap();
        assert!(report.final_loss <= 1e-28, "seed {seed}: {:e}", report.final_loss);
        assert!(report.iterations <= 5);
        for (a, b) in obj.theta.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }
}

#[test]
fn zero_iterations_reports_max_iters() {
    let mut obj = Affine::random(10, 3, true, 1);
    let report = minimize(
        &mut obj,
        &LmConfig {
            max_iters: 0,
            ..LmConfig::default()
        },
    )
    .unwrap();
    assert_eq!((report.iterations, report.stop_reason), (0, StopReason::MaxIters));
    assert_eq!(report.loss_history.len(), 1);
    assert_eq!(obj.theta, vec![0.0; 3]);
}

#[test]
fn inconsistent_system_stalls_at_the_minimum() {
    let mut obj = Affine::random(30, 4, false, 2);
    let report = minimize(&mut obj, &LmConfig::default()).unwrap();
    assert_eq!(report.stop_reason, StopReason::Stalled);
    // the loss is flat to rounding within ~1e-8 of the minimiser, so compare
    // losses tightly and parameters loosely
    let oracle = obj.lstsq();
    for (a, b) in obj.theta.iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0));
    }
    let at_oracle = Affine { theta: oracle, ..obj };
    let best = sum_of_squares(&at_oracle.residual().unwrap());
    assert!((report.final_loss - best).abs() <= 1e-13 * best);
}

#[test]
fn invalid_configs_are_rejected() {
    let mut obj = Affine::random(4, 2, true, 0);
    for cfg in [
        LmConfig {
            lambda_up: 0.5,
            ..LmConfig::default()
        },
        LmConfig {
            lambda_down: 1.5,
            ..LmConfig::default()
        },
        LmConfig {
            loss_tol: 0.0,
            ..LmConfig::default()
        },
        LmConfig {
            lambda_init: 1e20,
            ..LmConfig::default()
        },
    ] {
        assert!(matches!(minimize(&mut obj, &cfg), Err(Error::InvalidConfig(_))));
    }
}

struct Broken;

impl LeastSquares for Broken {
    fn params(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn set_params(&mut self, _: &[f64]) -> Result<()> {
        Ok(())
    }
    fn residual(&self) -> Result<Vec<f64>> {
        Ok(vec![f64::NAN])
    }
    fn residual_jacobian(&self) -> Result<ResidualJacobian> {
        unreachable!()
    }
}

#[test]
fn non_finite_initial_loss_aborts() {
    assert!(matches!(
        minimize(&mut Broken, &LmConfig::default()),
        Err(Error::NonFiniteLoss { iteration: 0, .. })
    ));
}

fn small_pinn(id: ProblemId, eps: f64, seed: u64) -> (crate::problems::ProblemSpec, SolutionModel, CollocationSet) {
    let spec = problem(id);
    let model = build_model(
        spec.geometry(false),
        spec.n_components,
        5,
        spec.domain.model_level_sets(),
        eps,
        InitConfig { seed },
    )
    .unwrap();
    let counts = SamplingCounts {
        interior: 20,
        layer_per_side: 10,
        boundary: 12,
    };
    let c = sample_collocation(&spec, eps, &counts, seed).unwrap();
    (spec, model, c)
}

#[test]
fn gradient_matches_finite_differences_of_the_loss() {
    for (k, id) in [ProblemId::Ex1, ProblemId::Ex4, ProblemId::Ex7].into_iter().enumerate() {
        let (spec, mut model, c) = small_pinn(id, 0.2, k as u64);
        let jac = assemble_residual_jacobian(&spec, &model, &c).unwrap();
        let ne = NormalEquations::new(&jac).unwrap();
        let theta = model.theta();
        let loss_at = |m: &SolutionModel| sum_of_squares(&build_residual(&spec, m, &c).unwrap().entries);
        for j in (0..theta.len()).step_by(7) {
            let h = 1e-6 * theta[j].abs().max(1.0);
            let mut t = theta.clone();
            t[j] += h;
            model.set_theta(&t).unwrap();
            let lp = loss_at(&model);
            t[j] -= 2.0 * h;
            model.set_theta(&t).unwrap();
            let lm = loss_at(&model);
            let fd = (lp - lm) / (2.0 * h);
            let g = 2.0 * ne.gradient()[j];
            assert!((g - fd).abs() <= 1e-4 * fd.abs().max(1e-6), "{id} θ{j}: {g} vs {fd}");
        }
        model.set_theta(&theta).unwrap();
    }
}

#[test]
fn training_history_is_monotone_and_reproducible() {
    let cfg = LmConfig {
        max_iters: 30,
        ..LmConfig::default()
    };
    let (spec, mut a, c) = small_pinn(ProblemId::Ex3, 1e-2, 4);
    let mut b = a.clone();
    let ra = train(&spec, &mut a, &c, &cfg).unwrap();
    let rb = train(&spec, &mut b, &c, &cfg).unwrap();
    assert_eq!(ra.loss_history, rb.loss_history);
    assert_eq!(a, b);
    assert!(ra.loss_history.windows(2).all(|w| w[1] < w[0]));
    assert!(ra.loss_history.last().unwrap() < &ra.loss_history[0]);
    assert_eq!(ra.final_loss, *ra.loss_history.last().unwrap());
    // every rejection raises λ, every acceptance lowers it
    for w in ra.events.windows(2) {
        if w[0].accepted {
            assert!(w[1].lambda < w[0].lambda || w[1].lambda == cfg.min_lambda);
        } else {
            assert!(w[1].lambda > w[0].lambda);
        }
    }
    assert!(ra
        .events
        .iter()
        .all(|e| e.lambda >= cfg.min_lambda && e.lambda <= cfg.max_lambda));
    let final_loss = sum_of_squares(&build_residual(&spec, &a, &c).unwrap().entries);
    assert_eq!(final_loss, ra.final_loss);
}

#[test]
fn history_csv_lists_every_proposal() {
    let (spec, mut m, c) = small_pinn(ProblemId::Ex2, 1e-1, 2);
    let r = train(
        &spec,
        &mut m,
        &c,
        &LmConfig {
            max_iters: 5,
            ..LmConfig::default()
        },
    )
    .unwrap();
    let mut buf = Vec::new();
    r.write_history_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("iteration,loss,lambda,accepted"));
    assert_eq!(text.lines().count(), 2 + r.events.len());
}
