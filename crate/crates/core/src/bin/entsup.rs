use std::process::ExitCode;

use clap::Parser;
use entsup::cli::{self, Cli};

fn main() -> ExitCode {
    cli::run(&Cli::parse())
}
