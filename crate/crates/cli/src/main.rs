//! `layerpot`: reproducible experiments on logarithmic double layer
//! potentials. Every run writes CSV files (and SVG plots where a log-log
//! view makes sense) named after the hash of its configuration.
//!
//! Exit codes: 0 pass, 1 configuration error, 2 invariant failure,
//! 3 numerical non-convergence.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand};

use config::{ConfigArgs, Defaults, ExperimentConfig, SideChoice};
use error::CliError;

#[derive(Parser)]
#[command(name = "layerpot", version, about = "Double layer potential experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ahlfors measure, arg variation and Král integral of a curve.
    Geometry(ConfigArgs),
    /// Boundary values from both sides and the jump residual.
    JumpTest(ConfigArgs),
    /// Solid modulus against the upper-bound functionals.
    ZygmundCheck(ConfigArgs),
    /// Lower-bound ratios for an extremal density.
    Sharpness(ConfigArgs),
    /// `Re g̃` on a lattice around the curve.
    PotentialScan(ConfigArgs),
}

fn run(cli: Cli) -> Result<commands::Outcome, CliError> {
    let defaults = |density, eps_count, samples, side| Defaults { density, eps_count, samples, side };
    let (name, args, d, f): (&str, ConfigArgs, Defaults, fn(&ExperimentConfig) -> _) = match cli.command {
        Command::Geometry(a) => ("geometry", a, defaults("re", 6, 1024, SideChoice::Both), commands::geometry),
        Command::JumpTest(a) => ("jump-test", a, defaults("re", 6, 1024, SideChoice::Both), commands::jump_test),
        Command::ZygmundCheck(a) => {
            ("zygmund-check", a, defaults("holder:t0=0,alpha=0.5", 6, 2048, SideChoice::Plus), commands::zygmund_check)
        }
        Command::Sharpness(a) => {
            ("sharpness", a, defaults("thm3:mu=power:1", 5, 2048, SideChoice::Plus), commands::sharpness)
        }
        Command::PotentialScan(a) => {
            ("potential-scan", a, defaults("re", 6, 1024, SideChoice::Both), commands::potential_scan)
        }
    };
    let cfg = ExperimentConfig::resolve(name, &args, d)?;
    f(&cfg)
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            println!("{}", out.summary);
            for f in &out.files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
