use std::process::ExitCode;

use boxtail::Cli;
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match boxtail::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
