use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use asymlab_cli::{execute, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let out = execute(&cli);
    if cli.timing {
        eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    }
    match out {
        Ok(text) => match std::io::stdout().lock().write_all(text.as_bytes()) {
            // a closed pipe downstream is not our failure
            Ok(()) => ExitCode::SUCCESS,
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("asymlab: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("asymlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
