use std::process::ExitCode;

use clap::Parser;
use tps::cli::Cli;
use tps::{run, CliConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = CliConfig::from_cli(&cli).and_then(|cfg| run::execute(&cfg, &mut std::io::stdout()));
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
