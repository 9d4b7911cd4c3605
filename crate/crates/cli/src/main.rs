mod args;
mod commands;
mod config;
mod error;
mod inputs;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return error::invalid("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Separator(a) => commands::separator(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Reconstruct(a) => commands::reconstruct_cmd(a),
        Command::Timereverse(a) => commands::timereverse(a),
        Command::Levitate(a) => commands::levitate(a),
        Command::LayerLevitate(a) => commands::layer_levitate(a),
    }
}

fn main() {
    let argv = match config::expand_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    };
    let cli = Cli::parse_from(argv);
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
