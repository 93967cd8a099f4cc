use std::process::ExitCode;

use clap::Parser;
use lws_baseline::cli::{run, Cli, RunConfig, OUTPUT_DIR_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output_dir = std::env::var_os(OUTPUT_DIR_ENV).map(Into::into);
    let result = RunConfig::from_cli(cli, output_dir).and_then(|config| run(&config));
    match result {
        Ok(out) => {
            print!("{}", out.summary);
            for path in out.written {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
