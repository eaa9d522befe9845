use clap::Parser;
use spd_cli::{init_threads, run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = init_threads().and_then(|_| run(cli)).unwrap_or_else(|e| {
        eprintln!("{}", e.to_json());
        e.exit_code()
    });
    std::process::exit(code);
}
