mod args;
mod commands;
mod error;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("ROOMEQ_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("ROOMEQ_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match &cli.command {
        Command::Locate(a) => commands::locate(a),
        Command::Prototype(a) => commands::prototype(a),
        Command::Invert(a) => commands::invert_cmd(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Experiment(a) => commands::experiment(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
