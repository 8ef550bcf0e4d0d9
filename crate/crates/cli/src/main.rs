use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use hamspace_cli::{emit, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli, &outcome) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            match outcome.failure {
                Some(msg) => {
                    eprintln!("oracle check failed: {msg}");
                    ExitCode::from(4)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
