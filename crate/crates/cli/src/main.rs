mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

const EXIT_ERROR: u8 = 1;
const EXIT_VIOLATION: u8 = 2;

fn run() -> Result<bool, String> {
    let argv = config::expand(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // help and version are not failures
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            std::process::exit(code.into());
        }
    };
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let seed = cli.seed;
    let outcome = match &cli.command {
        Command::Pip(a) => commands::pip(a, seed)?,
        Command::Certify(a) => commands::certify(a, seed)?,
        Command::Backflow(a) => commands::backflow(a, seed)?,
        Command::Sweep(a) => commands::sweep(a, seed)?,
        Command::Recovery(a) => commands::recovery(a, seed)?,
    };
    outcome.table.emit(cli.out.as_deref())?;
    Ok(outcome.violation)
}

fn main() -> ExitCode {
    match run() {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("darwinlab: certified violation found");
            ExitCode::from(EXIT_VIOLATION)
        }
        Err(e) => {
            eprintln!("darwinlab: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
