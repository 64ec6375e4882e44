use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    ExitCode::from(spdkit_cli::run(spdkit_cli::Cli::parse()))
}
