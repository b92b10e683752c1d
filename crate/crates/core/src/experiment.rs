//! Single training trials and multi-trial sweeps.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metrics::{aggregate_trials, evaluate_model, ErrorReport};
use crate::network::{build_model, InitConfig, SolutionModel};
use crate::optimizer::{train, LmConfig, TrainReport};
use crate::problems::{problem, ProblemId, SamplingCounts};
use crate::sampling::{sample_collocation_scaled, sample_test_set, CollocationSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub problem: ProblemId,
    pub epsilon: f64,
    pub hidden: usize,
    pub counts: SamplingCounts,
    /// `σ_std / ε` for layer sampling.
    pub sigma_scale: f64,
    pub lm: LmConfig,
    pub seed: u64,
    pub irregular_full_inputs: bool,
}

impl TrialConfig {
    /// Reference setup of `problem` at `epsilon`.
    pub fn defaults(id: ProblemId, epsilon: f64, seed: u64) -> Self {
        let spec = problem(id);
        Self {
            problem: id,
            epsilon,
            hidden: spec.default_hidden(),
            counts: spec.default_counts(),
            sigma_scale: 1.0,
            lm: LmConfig::default(),
            seed,
            irregular_full_inputs: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub model: SolutionModel,
    pub train: TrainReport,
    /// `None` when the problem has no exact solution.
    pub errors: Option<ErrorReport>,
    pub colloc: CollocationSet,
}

/// Samples, builds, trains and evaluates one model. Training points, test
/// points and the initial parameters all derive from `config.seed`.
pub fn run_trial(config: &TrialConfig) -> Result<TrialOutcome> {
    let spec = problem(config.problem);
    let colloc = sample_collocation_scaled(&spec, config.epsilon, &config.counts, config.sigma_scale, config.seed)?;
    let mut model = build_model(
        spec.geometry(config.irregular_full_inputs),
        spec.n_components,
        config.hidden,
        spec.domain.model_level_sets(),
        config.epsilon,
        InitConfig { seed: config.seed },
    )?;
    let mut report = train(&spec, &mut model, &colloc, &config.lm)?;
    report.seed = config.seed;
    let errors = if spec.has_exact() {
        let test = sample_test_set(&spec, config.epsilon, &config.counts, config.seed)?;
        Some(evaluate_model(&spec, &model, &test)?)
    } else {
        None
    };
    Ok(TrialOutcome {
        model,
        train: report,
        errors,
        colloc,
    })
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub epsilon: f64,
    pub trials: Vec<TrialOutcome>,
    pub aggregate: Option<ErrorReport>,
}

/// Runs `trials` seeds `seed_base, seed_base + 1, …` at every ε of the grid.
pub fn sweep(base: &TrialConfig, epsilons: &[f64], trials: usize, seed_base: u64) -> Result<Vec<SweepCell>> {
    let mut cells = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let mut outcomes = Vec::with_capacity(trials);
        for t in 0..trials {
            let cfg = TrialConfig {
                epsilon: eps,
                seed: seed_base + t as u64,
                ..base.clone()
            };
            outcomes.push(run_trial(&cfg)?);
        }
        let reports: Vec<ErrorReport> = outcomes.iter().filter_map(|o| o.errors.clone()).collect();
        let aggregate = if reports.is_empty() {
            None
        } else {
            Some(aggregate_trials(&reports)?)
        };
        cells.push(SweepCell {
            epsilon: eps,
            trials: outcomes,
            aggregate,
        });
    }
    Ok(cells)
}
