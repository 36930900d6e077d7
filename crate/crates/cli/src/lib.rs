//! Command-line front-end of `ratfit`.

pub mod app;
pub mod bench;
pub mod commands;
pub mod csvio;
pub mod error;
pub mod modelfile;

use app::{Cli, Command};
use error::CliResult;

/// Worker cap read from the environment.
pub const THREADS_VAR: &str = "RATFIT_THREADS";

/// Runs one parsed command, printing short summaries to stdout.
pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Sample(args) => {
            let k = commands::cmd_sample(args)?;
            println!("wrote {k} points to {}", args.out);
        }
        Command::Fit(args) => {
            let (model, _) = commands::cmd_fit(args)?;
            println!(
                "fitted {} model with degrees ({}, {}) to {}",
                args.method.name(),
                model.numerator_degree(),
                model.denominator_degree(),
                args.out
            );
        }
        Command::Eval(args) => {
            let k = commands::cmd_eval(args)?;
            println!("wrote {k} values to {}", args.out);
        }
        Command::Bench(args) => {
            let rows = bench::cmd_bench(args)?;
            let failed = rows.iter().filter(|r| r.result.is_err()).count();
            println!("wrote {} rows to {} ({failed} failed)", rows.len(), args.out);
        }
        Command::Lcurve(args) => {
            let curve = commands::cmd_lcurve(args)?;
            if curve.no_corner {
                eprintln!("warning: the L-curve has no corner; reporting the last point");
            }
            println!("corner sigma = {}", csvio::fmt_f64(curve.corner_sigma()));
        }
    }
    Ok(())
}
