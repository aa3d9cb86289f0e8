//! `nmshare`: command-line front end to the library.
//!
//! Every command prints JSON, one document per line (indented with `--pretty`).
//! Exit status is 0 on success, 1 when a checked property fails or tampering is
//! detected, 2 on malformed input or invalid parameters.

mod cli;

use std::process::ExitCode;

use clap::Parser;

use crate::cli::{Cli, Outcome};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match cli.run() {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
