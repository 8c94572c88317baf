use clap::Parser;
use rkinner_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = rkinner_cli::execute(&cli) {
        eprintln!("error: {}", e);
        std::process::exit(rkinner_cli::exit_code(e.kind()));
    }
}
