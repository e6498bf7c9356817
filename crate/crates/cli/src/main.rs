use clap::Parser;

fn main() {
    std::process::exit(omring::main_with(omring::Args::parse()));
}
