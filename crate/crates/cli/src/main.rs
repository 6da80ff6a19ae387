mod cache;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use crate::config::ReportFormat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Check that a_0 is the unique interior lattice point
    CheckGate,
    /// The series Φ
    Phi,
    /// The truncation Φ₁ of degree ≤ p-1
    Phi1,
    /// Coefficients of the splitting function θ
    BTable,
    /// The polynomial B_μ(1, t) for --mu
    Bmu,
    /// α* applied to the seed
    Alpha,
    /// β-iteration from the seed
    Fixpoint,
    /// α*(ξ) = pξ for the explicit eigenvector
    Eigen,
    /// All checks, as a congruence report
    Verify,
    /// Evaluate Φ/Φ^σ at integer values mod p^s
    Specialize,
    /// The congruence report with tail bounds and the decay table
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Structured,
}

#[derive(Debug, Parser)]
#[command(
    name = "ahyper",
    version,
    about = "Exact A-hypergeometric series and Dwork's Frobenius operator"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Problem file (key = value lines)
    #[arg(long)]
    pub config: PathBuf,
    /// Write the output here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Override the degree bound D_λ (for b-table: the largest index)
    #[arg(long)]
    pub degree: Option<u32>,
    /// Override the weight bound D_x
    #[arg(long)]
    pub weight: Option<i64>,
    /// Lattice point μ for `bmu`, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Integer values of t_1..t_N for `specialize`, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub modulus_power: u32,
    /// Iteration cap for the β-iteration
    #[arg(long, default_value_t = 50)]
    pub iters: usize,
    /// Cache directory (overrides AHYPER_CACHE_DIR and the config file)
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Allow p = 2: runs the mod-p congruence only, unproven
    #[arg(long)]
    pub allow_p2: bool,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => ReportFormat::Text,
            FormatArg::Structured => ReportFormat::Structured,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &outcome.output).map_err(anyhow::Error::from),
                None => {
                    print!("{}", outcome.output);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
