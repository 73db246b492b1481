use clap::Parser;

use diffops::cli::{main_run, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(main_run(&cli));
}
