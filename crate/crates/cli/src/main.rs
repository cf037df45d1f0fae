use std::process::ExitCode;

use axioclust_cli::args::Cli;
use axioclust_cli::pipeline::{emit, Exit};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out().map(ToOwned::to_owned);
    match cli.execute().and_then(|o| emit(&o, out.as_deref()).map(|()| o.exit)) {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Exit::Error as u8)
        }
    }
}
