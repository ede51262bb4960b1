//! Command-line driver for the experiment, bound-validation, complexity and
//! ingestion workflows.
//!
//! Exit codes: 0 success, 1 config error, 2 runtime failure, 3 bound
//! validation FAILED.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qsar::experiments::{
    ingest_arm_data, report_complexity, run_bound_validation, run_experiment, with_jobs,
    EnvironmentSource, ExperimentConfig,
};
use qsar::Error;

#[derive(Parser)]
#[command(
    name = "qsar",
    version,
    about = "Quantile-based fixed-budget best-arm identification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Common random numbers: every policy sees the same reward streams.
    #[arg(long, global = true)]
    crn: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate probability of error over the policy x budget grid.
    Run,
    /// Monte-Carlo check of the concentration bounds.
    ValidateBounds,
    /// Print gaps, problem complexity and the Q-SAR error bound.
    Complexity,
    /// Load arm_*.csv files and print per-arm summaries.
    IngestCheck {
        /// Directory of arm files (default: the config's data_dir).
        dir: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
    BoundsFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::parse("", std::path::Path::new("."))?,
    };
    if let Some(run) = config.run.as_mut() {
        if let Some(seed) = cli.seed {
            run.seed = seed;
        }
        if let Some(out) = &cli.out {
            run.output.clone_from(out);
        }
        run.crn |= cli.crn;
    }
    if let Some(seed) = cli.seed {
        config.bounds.seed = seed;
        config.complexity.seed = seed;
    }
    Ok(config)
}

fn require_config(cli: &Cli) -> Result<(), Failure> {
    if cli.config.is_none() {
        return Err(Failure::Config("this command needs --config <path>".into()));
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run => {
            require_config(cli)?;
            let config = load(cli)?;
            let output = with_jobs(cli.jobs, || run_experiment(&config))??;
            for row in &output.rows {
                println!(
                    "{:<9} N={:<7} errors {:>6}/{:<6} e_hat {:.4} (se {:.4})",
                    row.policy.to_string(),
                    row.budget,
                    row.estimate.errors,
                    row.estimate.runs,
                    row.estimate.e_hat,
                    row.estimate.stderr
                );
            }
            println!("wrote {}", output.results_csv.display());
            println!("wrote {}", output.plot_script.display());
        }
        Command::ValidateBounds => {
            let config = load(cli)?;
            let out = cli
                .out
                .clone()
                .or_else(|| config.run.as_ref().map(|r| r.output.clone()))
                .unwrap_or_else(|| PathBuf::from("results"));
            let output = with_jobs(cli.jobs, || run_bound_validation(&config, &out))??;
            println!("{output}");
            println!("wrote {}", out.display());
            if !output.passed {
                return Err(Failure::BoundsFailed);
            }
        }
        Command::Complexity => {
            require_config(cli)?;
            let config = load(cli)?;
            let output = with_jobs(cli.jobs, || report_complexity(&config))??;
            print!("{output}");
        }
        Command::IngestCheck { dir } => {
            let dir =
                match dir {
                    Some(d) => d.clone(),
                    None => {
                        let config = load(cli)?;
                        match config.environment.map(|e| e.source) {
                            Some(EnvironmentSource::DataDir(d)) => d,
                            _ => return Err(Failure::Config(
                                "ingest-check needs a directory argument or a config with data_dir"
                                    .into(),
                            )),
                        }
                    }
                };
            print!("{}", ingest_arm_data(&dir)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::BoundsFailed) => {
            eprintln!("bound validation FAILED");
            ExitCode::from(3)
        }
    }
}
