mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use config::{Command, RunConfig};
use error::CliError;

fn run(config: &RunConfig) -> Result<(), CliError> {
    if let Some(n) = config.workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Compute(e.to_string()))?;
    }
    match &config.command {
        Command::Rdm(a) => commands::rdm(a),
        Command::Sweep(a) => commands::sweep_cmd(config, a),
        Command::Fit(a) => commands::fit(config, a),
        Command::Factorize(a) => commands::factorize(config, a),
        Command::Boundscan(a) => commands::boundscan(config, a),
        Command::Fidelity(a) => commands::fidelity_cmd(config, a),
        Command::Verify(a) => commands::verify(config, a),
    }
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
