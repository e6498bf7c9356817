//! Command-line front end: reads a TOML run configuration, executes one task
//! and writes a self-describing CSV or JSON table.

pub mod config;
pub mod error;
pub mod output;
pub mod tasks;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use config::{RunConfig, Task};
pub use error::CliError;
pub use output::{Format, Report};
pub use tasks::{execute, Outcome};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "omring", version, about = "Optomechanical ring isolator model")]
pub struct Args {
    /// pump, spectrum, phase, bandwidth, contour, noise, squeezing, classify or verify
    task: Task,
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Worker threads for sweeps
    #[arg(long, env = "OMRING_THREADS")]
    threads: Option<usize>,
}

/// Runs one invocation and returns the process exit code.
pub fn main_with(args: Args) -> i32 {
    match run(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_line());
            e.code
        }
    }
}

fn run(args: &Args) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be >= 1"));
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg = RunConfig::from_toml(&text)?;
    let outcome = execute(args.task, &cfg)?;
    let format = match args.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let body = outcome.report.render(format);
    match &args.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{body}"),
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
