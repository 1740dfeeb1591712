//! `foxh`: Fox-H sums and RIS link analysis from the command line.
//!
//! Exit status is 0 on success, 2 for configuration errors and 3 for
//! numerical failures.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "foxh",
    version,
    about = "Fox-H sum distributions and RIS link metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

/// Flags shared by all subcommands; they override the config file.
#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV path (standard output when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Relative error above which results carry a warning.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// QMC points per randomization.
    #[arg(long, global = true)]
    qmc_samples: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma_th_db: Option<f64>,
    /// Inclusive grid `start:stop:step` in dB.
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma0_db_range: Option<String>,
    /// Number of identical elements (copies of the first configured one).
    #[arg(long, global = true)]
    elements: Option<usize>,
    /// Phase quantization bits for every element (0 = no phase error).
    #[arg(long, global = true, conflicts_with = "ideal_phase")]
    phase_bits: Option<u32>,
    #[arg(long, global = true)]
    ideal_phase: bool,
    /// Check descriptor normalization and moments before running.
    #[arg(long, global = true)]
    validate: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a serialized density at given abscissae.
    EvalFoxh {
        /// Density file in the `foxh-density 1` text form.
        #[arg(long, conflicts_with = "demo")]
        descriptor: Option<PathBuf>,
        #[arg(long)]
        demo: Option<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
    },
    /// PDF of the sum.
    SumPdf {
        /// `gamma2x2` sums two Gamma(2, 1) variables instead of the surface.
        #[arg(long)]
        demo: Option<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
    },
    /// CDF of the sum.
    SumCdf {
        #[arg(long)]
        demo: Option<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
    },
    /// Laplace transform `E[e^{-tZ}]` of one element (or demo component).
    Mgf {
        #[arg(long)]
        demo: Option<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
    },
    /// Outage probability over the γ₀ grid.
    Outage {
        /// Add Monte Carlo 95% brackets.
        #[arg(long)]
        with_mc: bool,
    },
    /// Ergodic capacity over the γ₀ grid.
    Capacity,
    /// `E[γⁿ]` over the γ₀ grid.
    Moment {
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Monte Carlo outage and capacity over the γ₀ grid.
    Simulate,
    /// Outage (exact and asymptotic) and capacity over the γ₀ grid.
    Sweep,
    /// Print the sum descriptor in text form.
    DumpDescriptor {
        #[arg(long)]
        cdf: bool,
        /// Re-parse the output and require a byte-identical round trip.
        #[arg(long)]
        check: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("foxh: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
