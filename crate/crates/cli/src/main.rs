use clap::Parser;

use mxfreq_cli::args::Cli;
use mxfreq_cli::{execute, RunConfig};

fn main() {
    let cli = Cli::parse();
    let status = match RunConfig::from_cli(cli).and_then(|config| execute(&config)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mxfreq: {e}");
            e.exit_code()
        }
    };
    std::process::exit(status);
}
