use clap::Parser;

use ratfit_cli::app::Cli;
use ratfit_cli::{run, THREADS_VAR};

fn main() {
    let cli = Cli::parse();
    if let Ok(value) = std::env::var(THREADS_VAR) {
        match value.trim().parse::<usize>() {
            Ok(threads) if threads > 0 => {
                // only fails if a pool already exists
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
            _ => {
                eprintln!("error: {THREADS_VAR} must be a positive integer, got {value:?}");
                std::process::exit(2);
            }
        }
    }
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
