use std::process::ExitCode;

use clap::Parser;
use gravtritter_cli::{emit, run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GRAVTRITTER_LOG", "warn"))
        .format_timestamp(None)
        .init();

    let cli = Cli::parse();
    let result = run(&cli).and_then(|bytes| emit(cli.out.as_deref(), &bytes));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gravtritter {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
