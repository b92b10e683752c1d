use std::path::PathBuf;
use std::process::ExitCode;

use blpinn::network::SolutionModel;
use blpinn::problems::{registry, Domain, ProblemId};
use blpinn_cli::config::{short_hash, ConfigFile, ExperimentConfig, Overrides};
use blpinn_cli::runner::{dump_fields, header_line, run_experiment, RunSummary};
use blpinn_cli::CliError;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "blpinn", version, about = "Boundary-layer PINN experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train at a single ε.
    Run(RunArgs),
    /// Train over the whole ε grid and write error tables.
    Sweep(RunArgs),
    /// List the registered problems.
    List,
    /// Evaluate a saved checkpoint on the plotting grids.
    DumpFields(DumpArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem id, `ex1` to `ex7`.
    #[arg(long)]
    problem: Option<String>,
    /// One ε, or a comma-separated grid.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Trials per ε, at most 5.
    #[arg(long)]
    trials: Option<usize>,
    /// Seed of the first trial; trial t uses seed + t.
    #[arg(long)]
    seed: Option<u64>,
    /// Hidden width of every block.
    #[arg(long)]
    hidden: Option<usize>,
    /// LM iteration budget.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Output directory (default `out/<problem>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write solution fields for every trial.
    #[arg(long)]
    fields: bool,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    problem: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1001)]
    points: usize,
    #[arg(long, default_value_t = 101)]
    points_2d: usize,
}

fn resolve(args: RunArgs) -> Result<ExperimentConfig, CliError> {
    let file = match &args.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let ov = Overrides {
        problem: args.problem,
        eps: args.eps,
        trials: args.trials,
        seed: args.seed,
        hidden: args.hidden,
        max_iters: args.max_iters,
        out: args.out,
        emit_fields: args.fields.then_some(true),
    };
    ExperimentConfig::resolve(file, ov)
}

fn run(args: RunArgs, single: bool) -> Result<(), CliError> {
    let cfg = resolve(args)?;
    if single && cfg.epsilon_grid.len() != 1 {
        return Err(CliError::Config(format!(
            "`run` takes one ε, got {} (pass --eps or use `sweep`)",
            cfg.epsilon_grid.len()
        )));
    }
    eprintln!(
        "{} | {} ε value(s) x {} trial(s) | hidden {} | config {} | out {}",
        cfg.problem,
        cfg.epsilon_grid.len(),
        cfg.trials,
        cfg.hidden,
        cfg.hash(),
        cfg.output_dir.display()
    );
    let summary = run_experiment(&cfg, |r| {
        let t = &r.outcome.train;
        let errs = r.outcome.errors.as_ref().map_or_else(String::new, |e| {
            format!(" rel_l2 {:?} rel_linf {:?}", e.rel_l2, e.rel_linf)
        });
        eprintln!(
            "  ε={:e} trial {} seed {}: {} its ({}) loss {:.3e} in {:.1}s{errs}",
            r.epsilon,
            r.trial,
            r.seed,
            t.iterations,
            t.stop_reason.as_str(),
            t.final_loss,
            r.elapsed.as_secs_f64()
        );
    })?;
    print_summary(&cfg, &summary);
    Ok(())
}

fn print_summary(cfg: &ExperimentConfig, s: &RunSummary) {
    let n = blpinn::problems::problem(cfg.problem).n_components;
    for (eps, rep) in &s.cells {
        match rep {
            Some(r) => {
                for k in 0..n {
                    println!(
                        "{} ε={eps:e} component {k}: rel_l2 {:.3e} rel_linf {:.3e} ({} trials)",
                        cfg.problem, r.rel_l2[k], r.rel_linf[k], r.trials
                    );
                }
            }
            None => {
                let losses: Vec<String> = s
                    .trials
                    .iter()
                    .filter(|t| t.epsilon == *eps)
                    .map(|t| format!("{:.3e}", t.outcome.train.final_loss))
                    .collect();
                println!(
                    "{} ε={eps:e}: no exact solution; final loss {}",
                    cfg.problem,
                    losses.join(" ")
                );
            }
        }
    }
    println!("wrote {} files under {}", s.files.len(), cfg.output_dir.display());
}

fn list() {
    println!(
        "{:<4} {:>3} {:>10} {:>6}  {:<11} description",
        "id", "dim", "components", "exact", "domain"
    );
    for p in registry() {
        let domain = match p.domain {
            Domain::Interval { .. } => "interval",
            Domain::Rectangle { .. } => "rectangle",
            Domain::LevelSet { .. } => "level set",
        };
        println!(
            "{:<4} {:>3} {:>10} {:>6}  {:<11} {}",
            p.id,
            p.dim(),
            p.n_components,
            if p.has_exact() { "yes" } else { "no" },
            domain,
            p.description
        );
    }
}

fn dump(args: DumpArgs) -> Result<(), CliError> {
    let id: ProblemId = args
        .problem
        .parse()
        .map_err(|e: blpinn::Error| CliError::Config(e.to_string()))?;
    let spec = blpinn::problems::problem(id);
    if args.points < 2 || args.points_2d < 2 {
        return Err(CliError::Config("field grids need at least 2 points".into()));
    }
    let bytes =
        std::fs::read(&args.checkpoint).map_err(|e| CliError::Io(format!("{}: {e}", args.checkpoint.display())))?;
    let model = SolutionModel::read_checkpoint(bytes.as_slice()).map_err(|e| CliError::Io(e.to_string()))?;
    if model.dim() != spec.dim() || model.n_components() != spec.n_components {
        return Err(CliError::Config(format!("checkpoint does not fit problem {id}")));
    }
    let stem = args
        .checkpoint
        .file_stem()
        .map_or_else(|| "fields".to_string(), |s| s.to_string_lossy().into_owned());
    let header = header_line(&short_hash(&bytes), None);
    let files = dump_fields(&args.out, &stem, &header, &spec, &model, args.points, args.points_2d)?;
    println!("wrote {} files under {}", files.len(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a, true),
        Command::Sweep(a) => run(a, false),
        Command::List => {
            list();
            Ok(())
        }
        Command::DumpFields(a) => dump(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
