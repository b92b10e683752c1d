//! Experiment configuration: a TOML file, command-line overrides, and the
//! resolved form that drives a run.

use std::path::{Path, PathBuf};

use blpinn::optimizer::LmConfig;
use blpinn::problems::{problem, ProblemId, SamplingCounts};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// ε values of the one-dimensional and rectangular sweeps.
pub const DEFAULT_EPSILON_GRID: [f64; 5] = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10];
pub const MAX_TRIALS: usize = 5;

/// Contents of a configuration file. Every key is optional; missing keys take
/// the problem's reference setup.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub problem: Option<String>,
    pub epsilon_grid: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub hidden: Option<usize>,
    pub counts: Option<SamplingCounts>,
    pub sigma_scale: Option<f64>,
    pub lm: Option<LmConfig>,
    pub seed_base: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub emit_fields: Option<bool>,
    pub irregular_full_inputs: Option<bool>,
    pub field_points: Option<usize>,
    pub field_points_2d: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Flag overrides; `None` leaves the file value alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub problem: Option<String>,
    pub eps: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub hidden: Option<usize>,
    pub max_iters: Option<usize>,
    pub out: Option<PathBuf>,
    pub emit_fields: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub problem: ProblemId,
    pub epsilon_grid: Vec<f64>,
    pub trials: usize,
    pub hidden: usize,
    pub counts: SamplingCounts,
    pub sigma_scale: f64,
    pub lm: LmConfig,
    pub seed_base: u64,
    /// Not part of the configuration hash: the same experiment written to two
    /// places must produce the same files.
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub emit_fields: bool,
    pub irregular_full_inputs: bool,
    /// Points of 1D grids and of the normal direction of layer grids.
    pub field_points: usize,
    /// Points per axis of 2D grids.
    pub field_points_2d: usize,
}

impl ExperimentConfig {
    pub fn resolve(file: ConfigFile, ov: Overrides) -> Result<Self, CliError> {
        let name = ov
            .problem
            .or(file.problem)
            .ok_or_else(|| CliError::Config("no problem given (use --problem or `problem = ...`)".into()))?;
        let id: ProblemId = name
            .parse()
            .map_err(|e: blpinn::Error| CliError::Config(e.to_string()))?;
        let spec = problem(id);
        let mut lm = file.lm.unwrap_or_default();
        if let Some(n) = ov.max_iters {
            lm.max_iters = n;
        }
        let cfg = Self {
            problem: id,
            epsilon_grid: ov
                .eps
                .or(file.epsilon_grid)
                .unwrap_or_else(|| DEFAULT_EPSILON_GRID.to_vec()),
            trials: ov.trials.or(file.trials).unwrap_or(MAX_TRIALS),
            hidden: ov.hidden.or(file.hidden).unwrap_or_else(|| spec.default_hidden()),
            counts: file.counts.unwrap_or_else(|| spec.default_counts()),
            sigma_scale: file.sigma_scale.unwrap_or(1.0),
            lm,
            seed_base: ov.seed.or(file.seed_base).unwrap_or(0),
            output_dir: ov
                .out
                .or(file.output_dir)
                .unwrap_or_else(|| PathBuf::from("out").join(id.as_str())),
            // problems without a closed form are judged from their fields
            emit_fields: ov.emit_fields.or(file.emit_fields).unwrap_or(!spec.has_exact()),
            irregular_full_inputs: file.irregular_full_inputs.unwrap_or(false),
            field_points: file.field_points.unwrap_or(1001),
            field_points_2d: file.field_points_2d.unwrap_or(101),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.epsilon_grid.is_empty() {
            return bad("epsilon_grid is empty".into());
        }
        if let Some(e) = self.epsilon_grid.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return bad(format!("epsilon {e} is outside (0, 1)"));
        }
        if self.trials == 0 || self.trials > MAX_TRIALS {
            return bad(format!("trials must be in 1..={MAX_TRIALS}, got {}", self.trials));
        }
        if self.hidden == 0 {
            return bad("hidden must be at least 1".into());
        }
        let c = self.counts;
        if c.interior == 0 || c.layer_per_side == 0 || c.boundary == 0 {
            return bad(format!("sampling counts must be positive: {c:?}"));
        }
        if !(self.sigma_scale.is_finite() && self.sigma_scale > 0.0) {
            return bad(format!("sigma_scale must be positive, got {}", self.sigma_scale));
        }
        if self.field_points < 2 || self.field_points_2d < 2 {
            return bad("field grids need at least 2 points".into());
        }
        self.lm.validate().map_err(|e| CliError::Config(e.to_string()))
    }

    /// First 16 hex digits of the SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> String {
        let text = toml::to_string(self).expect("config serializes");
        short_hash(text.as_bytes())
    }
}

pub fn short_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}
