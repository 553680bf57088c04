//! `hoyt`: command-line front end for `hoyt-core`.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numerical
//! or I/O failure.

mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    let outcome = match commands::run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Err(e) = output::emit(&outcome.report, outcome.format, outcome.output.as_deref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(3);
    }
    if outcome.failed {
        eprintln!("validation failed");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
