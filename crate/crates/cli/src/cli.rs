use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact and statistical analysis of r-th order nonlinearity of Boolean
/// functions.
#[derive(Debug, Parser)]
#[command(name = "boolnl", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Walsh-Hadamard spectrum of a truth table
    Wht(TableArgs),
    /// Algebraic normal form of a truth table
    Anf(TableArgs),
    /// r-th order nonlinearity of one or more truth tables
    Nonlin(NonlinArgs),
    /// Weight distribution of RM(r, n)
    Census(CensusArgs),
    /// Greedy separated subset of RM(r, n)
    SepSet(SepSetArgs),
    /// Evaluate every bound at (n, r) as CSV
    Bounds(BoundsArgs),
    /// Monte Carlo sweep of Y_n / lambda_n over n
    McConverge(SweepArgs),
    /// Joint upper tail of two correlations versus its bound
    McJoint(JointArgs),
    /// Empirical deviation frequencies of Y_n versus the concentration bound
    McConcentration(SweepArgs),
    /// Exact distribution of N_r over all functions on n <= 4 variables
    OracleExact(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Read key=value defaults from this file; explicit flags win
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output file (default: standard output)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Truth table as hex, most significant digit first
    #[arg(long, value_name = "HEX")]
    pub tt: Option<String>,

    /// File of hex tables, one per line, or a binary table file
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Number of variables
    #[arg(long)]
    pub n: u32,

    #[command(flatten)]
    pub input: Input,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct NonlinArgs {
    #[arg(long)]
    pub n: u32,

    /// Order of the code
    #[arg(long)]
    pub r: u32,

    #[command(flatten)]
    pub input: Input,

    /// Worker threads for exhaustive search
    #[arg(long, value_name = "J")]
    pub jobs: Option<usize>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long)]
    pub n: u32,

    #[arg(long)]
    pub r: u32,

    #[arg(long, value_name = "J")]
    pub jobs: Option<usize>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SepSetArgs {
    #[arg(long)]
    pub n: u32,

    #[arg(long)]
    pub r: u32,

    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Comma-separated list of n
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u32>,

    #[arg(long)]
    pub r: u32,

    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Sampling {
    /// Master seed, decimal or 0x-prefixed hex
    #[arg(long, value_parser = parse_u64, default_value = "0xB0A11F0042D5EC7A")]
    pub seed: u64,

    /// Samples per n
    #[arg(long, value_name = "M")]
    pub samples: u64,

    #[arg(long, value_name = "J")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u32>,

    #[arg(long)]
    pub r: u32,

    #[command(flatten)]
    pub sampling: Sampling,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct JointArgs {
    #[arg(long)]
    pub n: u32,

    #[arg(long)]
    pub r: u32,

    /// First codeword as hex (default: x1)
    #[arg(long, value_name = "HEX")]
    pub g_tt: Option<String>,

    /// Second codeword as hex (default: x2)
    #[arg(long, value_name = "HEX")]
    pub h_tt: Option<String>,

    #[command(flatten)]
    pub sampling: Sampling,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub n: u32,

    #[arg(long)]
    pub r: u32,

    #[command(flatten)]
    pub common: Common,
}

/// The parser with later flags overriding earlier ones, which is how config
/// file values yield to the command line.
pub fn command() -> clap::Command {
    let mut cmd = <Cli as clap::CommandFactory>::command();
    let names: Vec<String> = cmd.get_subcommands().map(|c| c.get_name().to_string()).collect();
    for name in names {
        cmd = cmd.mut_subcommand(name, |c| c.args_override_self(true));
    }
    cmd
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    let s = s.trim().replace('_', "");
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("{s:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definition_is_consistent() {
        command().debug_assert();
    }

    #[test]
    fn seeds() {
        assert_eq!(parse_u64("0xB0A11F0042D5EC7A"), Ok(0xB0A1_1F00_42D5_EC7A));
        assert_eq!(parse_u64("42"), Ok(42));
        assert!(parse_u64("0xZZ").is_err());
        assert!(parse_u64("-1").is_err());
    }
}
