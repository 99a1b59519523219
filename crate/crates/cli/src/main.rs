use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use deadcore_cli::commands::load_config_text;
use deadcore_cli::{run, CliError, Command, RunOptions};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sub {
    Radial,
    Solve,
    Analyze,
    Game,
    Liouville,
    Sweep,
}

/// Dead-core laboratory: writes CSV tables and a manifest.json into the output directory.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    command: Sub,
    /// Experiment config, or a manifest.json from an earlier run.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `out` in `[run]`.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads; defaults to the machine parallelism.
    #[arg(long, env = "DEADCORE_THREADS")]
    threads: Option<usize>,
    /// Overrides `seed` in `[run]`.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(args: Args) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads {n}: {e}")))?;
    }
    let text = load_config_text(&args.config)?;
    let command = match args.command {
        Sub::Radial => Command::Radial,
        Sub::Solve => Command::Solve,
        Sub::Analyze => Command::Analyze,
        Sub::Game => Command::Game,
        Sub::Liouville => Command::Liouville,
        Sub::Sweep => Command::Sweep,
    };
    run(command, &text, &RunOptions { out: args.out, seed: args.seed })?;
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("deadcore: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
