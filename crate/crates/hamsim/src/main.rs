use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hamsim::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => {
            let _ = lock.flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = lock.flush();
            eprintln!("{}", e.report_line());
            ExitCode::from(e.kind().exit_code() as u8)
        }
    }
}
