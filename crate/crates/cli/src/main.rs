mod args;
mod commands;
mod setup;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Compare(a) => commands::compare(a),
        Command::Certify(a) => commands::certify(a),
        Command::HelmholtzCheck(a) => commands::helmholtz_check(a),
        Command::PontryaginCheck(a) => commands::pontryagin_check(a),
        Command::MeasureCheck(a) => commands::measure_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
