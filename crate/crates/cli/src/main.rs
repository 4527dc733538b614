use std::process::ExitCode;

use clap::Parser;
use coulomb_pt_cli::{exit, run, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Success) => ExitCode::from(exit::SUCCESS),
        Ok(Status::ValidationFailed) => ExitCode::from(exit::VALIDATION_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
