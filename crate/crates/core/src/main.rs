use clap::Parser;

use hausdorff_ops::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
