use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mla_core::harness::{
    load_config, logistic_data, run_experiment, run_single, run_suite, write_csv, write_dataset,
    ExperimentConfig, ExperimentKind, Suite,
};
use mla_core::Error;

/// Mirror-Langevin sampling benchmarks.
#[derive(Parser)]
#[command(name = "mla", version)]
struct Cli {
    /// Override the master seed from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for chain-level parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured sampler once and write per-iteration moments.
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one of the comparison experiments.
    Experiment {
        #[arg(long)]
        name: ExperimentName,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the trial-0 logistic data set (blr only).
        #[arg(long)]
        dataset_out: Option<PathBuf>,
    },
    /// Run a property suite; exits nonzero if any property fails.
    Check {
        #[arg(long)]
        suite: SuiteName,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentName {
    Blr,
    SimplexQuadratic,
    Dirichlet,
}

impl ExperimentName {
    fn kind(self) -> ExperimentKind {
        match self {
            ExperimentName::Blr => ExperimentKind::Blr,
            ExperimentName::SimplexQuadratic => ExperimentKind::SimplexQuadratic,
            ExperimentName::Dirichlet => ExperimentKind::Dirichlet,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    Geometry,
    Samplers,
    Transport,
    Oracle,
}

impl SuiteName {
    fn suite(self) -> Suite {
        match self {
            SuiteName::Geometry => Suite::Geometry,
            SuiteName::Samplers => Suite::Samplers,
            SuiteName::Transport => Suite::Transport,
            SuiteName::Oracle => Suite::Oracle,
        }
    }
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::Chain { source, .. } => exit_code(source),
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

fn configure(path: &PathBuf, seed: Option<u64>) -> Result<ExperimentConfig, Error> {
    let mut cfg = load_config(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool, Error> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Validation(e.to_string()))?;
    }
    match cli.command {
        Command::Sample { config, out } => {
            let cfg = configure(&config, cli.seed)?;
            write_csv(&run_single(&cfg)?, &out)?;
            Ok(true)
        }
        Command::Experiment {
            name,
            config,
            out,
            dataset_out,
        } => {
            let cfg = configure(&config, cli.seed)?;
            if cfg.experiment != name.kind() {
                return Err(Error::Validation(format!(
                    "config describes `{}`, not `{}`",
                    cfg.experiment.name(),
                    name.kind().name()
                )));
            }
            if let Some(path) = dataset_out {
                if cfg.experiment != ExperimentKind::Blr {
                    return Err(Error::Validation("--dataset-out applies to blr only".into()));
                }
                write_dataset(&logistic_data(&cfg, 0)?, &path)?;
            }
            write_csv(&run_experiment(&cfg)?, &out)?;
            Ok(true)
        }
        Command::Check { suite } => {
            let suite = suite.suite();
            let outcomes = run_suite(suite, cli.seed.unwrap_or(0))?;
            let mut ok = true;
            for o in &outcomes {
                println!("{} {}: {} {}", if o.passed { "PASS" } else { "FAIL" }, suite.name(), o.name, o.detail);
                ok &= o.passed;
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
