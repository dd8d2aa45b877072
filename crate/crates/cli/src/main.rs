//! `intentnav`: run scripted trials, evaluate logs, serve live sessions.

mod eval;
mod options;
mod run;
mod serve;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Log directory used when `--out` / `--log-dir` is not given.
pub const LOG_DIR_ENV: &str = "INTENTNAV_LOG_DIR";

#[derive(Debug, Parser)]
#[command(name = "intentnav", version, about = "Goal intent recognition for teleoperated robots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run scripted trials and write one JSONL log per trial.
    Run(run::RunArgs),
    /// Aggregate a directory of trial logs into a CSV report.
    Eval(eval::EvalArgs),
    /// Serve the interactive session websocket.
    Serve(serve::ServeArgs),
}

/// A failed command, split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, files or configuration. Exit 2.
    Usage(String),
    /// Something went wrong while doing the work. Exit 1.
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run::run(args),
        Command::Eval(args) => eval::eval(args),
        Command::Serve(args) => serve::serve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
