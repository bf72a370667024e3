use std::process::ExitCode;

use clap::Parser;
use rxyjpeg::{exit, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("rxyjpeg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
