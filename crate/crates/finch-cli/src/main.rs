//! `finch` — coverage-guided fuzzing with branch-distance feedback.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use finch_cli::campaign::run_campaign;
use finch_cli::config::{CampaignSpec, ConfigLayer};
use finch_cli::report::report;
use finch_core::{builtin_targets, DistanceMode, FuzzMode, Normalization};

#[derive(Parser)]
#[command(name = "finch", version, about = "greybox fuzzing on branch distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one fuzzing campaign against a built-in target.
    Run(RunArgs),
    /// Summarize a campaign output directory and emit plot data.
    Report(ReportArgs),
    /// List the built-in targets.
    Targets,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in target name (see `finch targets`).
    #[arg(long)]
    target: Option<String>,
    /// Directory of seed files (every regular file is one input).
    #[arg(long)]
    seeds: Option<PathBuf>,
    /// Output directory for stats.csv, pareto/, crashes/.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Budget: total executions (including the initial corpus).
    #[arg(long, conflicts_with = "seconds")]
    execs: Option<u64>,
    /// Budget: wall-clock seconds.
    #[arg(long)]
    seconds: Option<f64>,
    /// Campaign mode.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<FuzzMode>,
    /// Campaign RNG seed (all randomness derives from it).
    #[arg(long)]
    seed: Option<u64>,
    /// Distance ceiling K.
    #[arg(long)]
    k: Option<u64>,
    /// Distance computation: abs | xor.
    #[arg(long, value_parser = parse_distance)]
    distance: Option<DistanceMode>,
    /// Label normalization: linear | log.
    #[arg(long, value_parser = parse_norm)]
    norm: Option<Normalization>,
    /// Hidden-layer width of the distance model.
    #[arg(long)]
    hidden: Option<usize>,
    /// Training epochs per generation.
    #[arg(long)]
    epochs: Option<usize>,
    /// Havoc mutants per seed as a fraction of its gradient-walk emissions.
    #[arg(long)]
    havoc_ratio: Option<f64>,
    /// Coverage map size (power of two).
    #[arg(long)]
    map_size: Option<usize>,
    /// key=value config file; explicit flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also dump every mutant batch under <out>/tmp/ for inspection.
    #[arg(long)]
    dump_tmp: bool,
}

fn parse_mode(s: &str) -> Result<FuzzMode, String> {
    match s {
        "finch" => Ok(FuzzMode::Finch),
        "baseline" => Ok(FuzzMode::Baseline),
        _ => Err("expected finch|baseline".into()),
    }
}

fn parse_distance(s: &str) -> Result<DistanceMode, String> {
    match s {
        "abs" => Ok(DistanceMode::Abs),
        "xor" => Ok(DistanceMode::Xor),
        _ => Err("expected abs|xor".into()),
    }
}

fn parse_norm(s: &str) -> Result<Normalization, String> {
    match s {
        "linear" => Ok(Normalization::Linear),
        "log" => Ok(Normalization::Log),
        _ => Err("expected linear|log".into()),
    }
}

impl RunArgs {
    fn as_layer(&self) -> ConfigLayer {
        ConfigLayer {
            target: self.target.clone(),
            seeds: self.seeds.clone(),
            out: self.out.clone(),
            execs: self.execs,
            seconds: self.seconds,
            seed: self.seed,
            mode: self.mode,
            k: self.k,
            distance: self.distance,
            norm: self.norm,
            hidden: self.hidden,
            epochs: self.epochs,
            havoc_ratio: self.havoc_ratio,
            mutant_budget: None,
            map_size: self.map_size,
            per_objective_gradients: None,
        }
    }
}

#[derive(Args)]
struct ReportArgs {
    /// Campaign output directory (as produced by `finch run`).
    out_dir: PathBuf,
    /// Re-execute pareto/ seeds and check mutual non-domination.
    #[arg(long)]
    verify: bool,
}

fn run(args: &RunArgs) -> ExitCode {
    let mut layer = ConfigLayer::default();
    if let Some(path) = &args.config {
        match ConfigLayer::from_file(path) {
            Ok(file_layer) => layer = file_layer,
            Err(err) => {
                eprintln!("error: {err}");
                return ExitCode::from(2);
            }
        }
    }
    let spec = match CampaignSpec::resolve(layer.overridden_by(&args.as_layer())) {
        Ok(spec) => spec,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };
    match run_campaign(&spec, args.dump_tmp) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(&args),
        Command::Report(args) => match report(&args.out_dir, args.verify) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err}");
                ExitCode::from(err.exit_code() as u8)
            }
        },
        Command::Targets => {
            for target in builtin_targets() {
                println!(
                    "{:<10} max {:>4} bytes  {}",
                    target.name(),
                    target.max_input_len(),
                    target.description()
                );
            }
            ExitCode::SUCCESS
        }
    }
}
