mod args;
mod commands;
mod error;
mod fixtures;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::error::{CliError, EXIT_OK, EXIT_PROPERTY};

fn emit(cli: &Cli) -> Result<i32, CliError> {
    if let Some(threads) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let outcome = commands::run(&cli.global, &cli.command)?;
    let summary = serde_json::to_string_pretty(&outcome.summary).expect("summary serializes");
    let mut stdout = std::io::stdout().lock();
    let io = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    match (&outcome.artifact, &cli.global.out) {
        (Some(artifact), Some(path)) => {
            commands::write_file(path, artifact)?;
            writeln!(stdout, "{summary}").map_err(io)?;
        }
        (Some(artifact), None) => {
            write!(stdout, "{artifact}").map_err(io)?;
            eprintln!("{summary}");
        }
        (None, Some(path)) => {
            commands::write_file(path, &format!("{summary}\n"))?;
            writeln!(stdout, "{summary}").map_err(io)?;
        }
        (None, None) => writeln!(stdout, "{summary}").map_err(io)?,
    }
    Ok(if outcome.success { EXIT_OK } else { EXIT_PROPERTY })
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    let code = match emit(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
