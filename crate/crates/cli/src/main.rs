use std::io;
use std::process::ExitCode;

use clap::Parser;
use reconfn_cli::{error_exit_code, execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    match execute(cli, &mut stdout) {
        Ok(verdict) => ExitCode::from(verdict.exit_code() as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(error_exit_code(&err) as u8)
        }
    }
}
