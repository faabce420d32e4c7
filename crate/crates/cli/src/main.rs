//! `lmattr`: run feature attributions over text models from the command
//! line, render saved results, and estimate evaluation budgets.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lmattr_cli::{cmd_backends, cmd_budget, cmd_render, cmd_run, exit_code, RenderFormat, RunFlags};

#[derive(Parser)]
#[command(name = "lmattr", version, about = "Feature attribution for generative text models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an attribution described by a config document.
    Run {
        /// Path to the JSON config document.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Result file path (default result.json).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Disable model-call memoization.
        #[arg(long)]
        no_cache: bool,
        /// Evaluation worker threads (default: one per core).
        #[arg(long)]
        workers: Option<usize>,
        /// HTTP request timeout in seconds (overrides the config).
        #[arg(long)]
        timeout_s: Option<u64>,
    },
    /// Render a saved result document.
    Render {
        /// Path to a result JSON file written by `run`.
        result: PathBuf,
        /// Output format: svg, html, or term.
        #[arg(long, default_value = "term")]
        format: String,
        /// Output file (default: stdout for term, result path with
        /// swapped extension otherwise).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print the evaluation budget of a config without running it.
    Budget {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the available model backends.
    Backends,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config, seed, out, no_cache, workers, timeout_s } => {
            let flags = RunFlags {
                seed: *seed,
                out: out.clone(),
                no_cache: *no_cache,
                workers: *workers,
                timeout_s: *timeout_s,
            };
            cmd_run(config, &flags)
        }
        Command::Render { result, format, out } => {
            RenderFormat::parse(format).and_then(|f| cmd_render(result, f, out.as_deref()))
        }
        Command::Budget { config } => cmd_budget(config),
        Command::Backends => cmd_backends(),
    };
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
    }
    ExitCode::from(exit_code(&outcome) as u8)
}
