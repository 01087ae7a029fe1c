use std::process::ExitCode;

use clap::Parser;
use indexlab_cli::{output_path, run, write_output, Cli, CliError, THREADS_ENV};

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Resolution(format!("{THREADS_ENV}={value} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Resolution(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| {
        let outcome = run(&cli)?;
        write_output(&outcome.bytes, output_path(&cli)?.as_deref())?;
        Ok(outcome.success)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("indexlab: {e}");
            if let CliError::Numerical(indexlab::Error::SlowDecay(d)) = &e {
                eprintln!("tail diagnostic: {d}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
