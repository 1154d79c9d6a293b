mod config;
mod run;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{resolve, Cli};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    /// Rejected input parameters.
    #[error("[{}] {0}", .0.module())]
    Guard(invsq::Error),
    #[error("[{}] {0}", .0.module())]
    Compute(invsq::Error),
    #[error("[io] {0}")]
    Io(#[from] std::io::Error),
    #[error("validation failed: {0} check(s) did not pass")]
    Validation(usize),
}

impl CliError {
    pub fn guard(e: invsq::Error) -> Self {
        CliError::Guard(e)
    }

    pub fn compute(e: invsq::Error) -> Self {
        match e {
            e @ (invsq::Error::Guard(_) | invsq::Error::Parameter(_)) => CliError::Guard(e),
            e => CliError::Compute(e),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Guard(_) => 2,
            CliError::Compute(_) | CliError::Io(_) | CliError::Validation(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // --help and --version land here too
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match resolve(cli).and_then(|cfg| execute(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cfg: &config::RunConfig) -> Result<(), CliError> {
    let out = run::run(cfg)?;
    match &cfg.out {
        Some(path) => fs::write(path, out.text.as_bytes())?,
        None => std::io::stdout().lock().write_all(out.text.as_bytes())?,
    }
    if let Some(report) = &out.report {
        eprint!("{report}");
    }
    if out.failed > 0 {
        return Err(CliError::Validation(out.failed));
    }
    Ok(())
}
