use std::process::ExitCode;

use clap::Parser;
use evlab::cli::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { evlab::EXIT_USAGE } else { evlab::EXIT_OK });
        }
    };
    match evlab::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("evlab: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
