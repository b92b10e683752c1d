//! Sweeps over ε and seeds, and the files they leave behind.
//!
//! Layout of the output directory:
//!
//! ```text
//! errors.csv            long error table (problems with a closed form)
//! errors_wide.csv       the same numbers, one column per ε
//! trials.csv            one row per trial: seed, iterations, stop reason, loss, errors
//! history/<run>.csv     LM events of each trial
//! checkpoints/<run>.txt trained parameters
//! fields/<run>_*.csv    solution fields, when enabled
//! ```
//!
//! Nothing time-dependent is written, so a rerun reproduces every byte.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use blpinn::experiment::{run_trial, TrialConfig, TrialOutcome};
use blpinn::metrics::{aggregate_trials, ErrorReport};
use blpinn::network::SolutionModel;
use blpinn::problems::{problem, ProblemSpec};

use crate::config::ExperimentConfig;
use crate::fields::{layer_grids, uniform_grid, write_field};
use crate::table::{table_rows, write_long, write_wide};
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn header_line(config_hash: &str, seed: Option<u64>) -> String {
    let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    format!("# blpinn {VERSION} config={config_hash} seed={seed}")
}

/// File stem of one trial, e.g. `eps1e-8_trial2`.
pub fn run_name(eps: f64, trial: usize) -> String {
    format!("eps{eps:e}_trial{trial}")
}

/// What a caller gets told after every trial.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub epsilon: f64,
    pub trial: usize,
    pub seed: u64,
    pub outcome: TrialOutcome,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub cells: Vec<(f64, Option<ErrorReport>)>,
    pub trials: Vec<TrialRecord>,
    pub files: Vec<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(io_err(path))
}

/// Writes the uniform and per-side layer fields of `model` under `dir`.
pub fn dump_fields(
    dir: &Path,
    stem: &str,
    header: &str,
    spec: &ProblemSpec,
    model: &SolutionModel,
    n1: usize,
    n2: usize,
) -> Result<Vec<PathBuf>, CliError> {
    create_dir(dir)?;
    let mut files = Vec::new();
    let path = dir.join(format!("{stem}_uniform.csv"));
    let grid = uniform_grid(spec, n1, n2);
    write_file(&path, |w| write_field(w, header, spec, model, &grid))?;
    files.push(path);
    for (side, grid) in layer_grids(spec, model.epsilon(), n1, n2) {
        let path = dir.join(format!("{stem}_layer_{side}.csv"));
        write_file(&path, |w| write_field(w, header, spec, model, &grid))?;
        files.push(path);
    }
    Ok(files)
}

pub fn run_experiment(cfg: &ExperimentConfig, mut progress: impl FnMut(&TrialRecord)) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let spec = problem(cfg.problem);
    let out = &cfg.output_dir;
    for sub in ["", "history", "checkpoints"] {
        create_dir(&out.join(sub))?;
    }
    let header = header_line(&cfg.hash(), Some(cfg.seed_base));
    let mut files = Vec::new();
    let mut records = Vec::new();
    let mut cells = Vec::new();

    for &eps in &cfg.epsilon_grid {
        let mut reports = Vec::new();
        for t in 0..cfg.trials {
            let seed = cfg.seed_base + t as u64;
            let tc = TrialConfig {
                problem: cfg.problem,
                epsilon: eps,
                hidden: cfg.hidden,
                counts: cfg.counts,
                sigma_scale: cfg.sigma_scale,
                lm: cfg.lm,
                seed,
                irregular_full_inputs: cfg.irregular_full_inputs,
            };
            let start = Instant::now();
            let outcome = run_trial(&tc).map_err(CliError::Training)?;
            let elapsed = start.elapsed();
            let stem = run_name(eps, t);

            let path = out.join("history").join(format!("{stem}.csv"));
            write_file(&path, |w| {
                writeln!(w, "{}", header_line(&cfg.hash(), Some(seed)))?;
                outcome.train.write_history_csv(w)
            })?;
            files.push(path);
            let path = out.join("checkpoints").join(format!("{stem}.txt"));
            write_file(&path, |w| {
                writeln!(w, "{}", header_line(&cfg.hash(), Some(seed)))?;
                outcome.model.write_checkpoint(w)
            })?;
            files.push(path);
            if cfg.emit_fields {
                let h = header_line(&cfg.hash(), Some(seed));
                files.extend(dump_fields(
                    &out.join("fields"),
                    &stem,
                    &h,
                    &spec,
                    &outcome.model,
                    cfg.field_points,
                    cfg.field_points_2d,
                )?);
            }
            if let Some(e) = &outcome.errors {
                reports.push(e.clone());
            }
            let rec = TrialRecord {
                epsilon: eps,
                trial: t,
                seed,
                outcome,
                elapsed,
            };
            progress(&rec);
            records.push(rec);
        }
        let agg = if reports.is_empty() {
            None
        } else {
            Some(aggregate_trials(&reports).map_err(CliError::Training)?)
        };
        cells.push((eps, agg));
    }

    let path = out.join("trials.csv");
    write_file(&path, |w| write_trials(w, &header, spec.n_components, &records))?;
    files.push(path);
    if spec.has_exact() {
        let table: Vec<(f64, ErrorReport)> = cells.iter().filter_map(|(e, r)| r.clone().map(|r| (*e, r))).collect();
        let path = out.join("errors.csv");
        write_file(&path, |w| write_long(w, &header, &table_rows(cfg.problem, &table)))?;
        files.push(path);
        let path = out.join("errors_wide.csv");
        write_file(&path, |w| write_wide(w, &header, cfg.problem, &table))?;
        files.push(path);
    }
    Ok(RunSummary {
        cells,
        trials: records,
        files,
    })
}

fn write_trials<W: Write>(mut w: W, header: &str, n: usize, records: &[TrialRecord]) -> std::io::Result<()> {
    writeln!(w, "{header}")?;
    write!(w, "epsilon,trial,seed,iterations,stop_reason,final_loss")?;
    for k in 0..n {
        write!(w, ",rel_l2_{k},rel_linf_{k}")?;
    }
    writeln!(w)?;
    for r in records {
        let t = &r.outcome.train;
        write!(
            w,
            "{:e},{},{},{},{},{:e}",
            r.epsilon,
            r.trial,
            r.seed,
            t.iterations,
            t.stop_reason.as_str(),
            t.final_loss
        )?;
        for k in 0..n {
            match &r.outcome.errors {
                Some(e) => write!(w, ",{:e},{:e}", e.rel_l2[k], e.rel_linf[k])?,
                None => write!(w, ",,")?,
            }
        }
        writeln!(w)?;
    }
    Ok(())
}
