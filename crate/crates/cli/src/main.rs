//! `binpv`: ingest corpora, train binary paragraph vector models, infer
//! codes, fit hashing baselines and evaluate retrieval.

mod args;
mod commands;
mod settings;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric divergence.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(binpv::Error),
}

impl From<binpv::Error> for CliError {
    fn from(e: binpv::Error) -> Self {
        match e {
            binpv::Error::InvalidConfig(m) => CliError::Usage(m),
            other => CliError::Data(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(binpv::Error::Diverged { .. } | binpv::Error::NonFiniteLoss) => 3,
            CliError::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::Train(a) => commands::train(a),
        Command::Infer(a) => commands::infer(a),
        Command::Baseline(a) => commands::baseline(a),
        Command::Eval(a) => commands::eval(a),
        Command::ExportVectors(a) => commands::export_vectors(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("binpv: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
