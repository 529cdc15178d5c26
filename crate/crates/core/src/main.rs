use clap::Parser;

use cavity_purification::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
