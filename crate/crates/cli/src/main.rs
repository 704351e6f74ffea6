use clap::Parser;

fn main() {
    if let Err(e) = eprb_cli::run(eprb_cli::Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
