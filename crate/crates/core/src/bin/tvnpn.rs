use clap::Parser;
use tvnpn::cli::{run, Cli};

fn main() -> anyhow::Result<()> {
    run(Cli::parse())
}
