use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod examples;
mod input;
mod output;

use cartanlab::fields::FieldDesc;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] cartanlab::Error),
}

impl CliError {
    fn context(self, what: &str) -> CliError {
        match self {
            CliError::Core(e) => match e {
                cartanlab::Error::Precondition(m) => CliError::Core(cartanlab::Error::Precondition(format!("{what}: {m}"))),
                cartanlab::Error::InvalidInput(m) => CliError::Input(format!("{what}: {m}")),
                other => CliError::Core(other),
            },
            other => other,
        }
    }

    fn exit_code(&self) -> u8 {
        use cartanlab::Error as E;
        match self {
            CliError::Io(_) => 1,
            CliError::Input(_) => 2,
            CliError::Core(E::Numerical(_) | E::Singular) => 3,
            CliError::Core(_) => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "cartanlab", version, about = "Cartan projections, proximal dynamics and bending deformations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON input file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// CSV output path; a JSON summary is written next to it. Defaults to stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Field override: real, complex, padic:P or quadratic:R.
    #[arg(long, global = true, value_parser = parse_field)]
    pub field: Option<FieldDesc>,
    /// Group override: sl:N, so:P,Q or u:P,Q.
    #[arg(long, global = true)]
    pub group: Option<String>,
    #[arg(long, global = true, default_value_t = 3)]
    pub radius: usize,
    /// Comma-separated deformation parameters.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Vec<f64>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Short-element cutoff of the envelope fit.
    #[arg(long, global = true)]
    pub rho0: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, env = "CARTANLAB_WORKERS")]
    pub workers: Option<usize>,
    /// Cut length for decompositions.
    #[arg(long, global = true)]
    pub step: Option<f64>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Cartan projection of each input matrix.
    Cartan,
    /// Word ball of a presentation.
    Ball,
    /// Proximality verdicts, with ε-proximality when --eps is given.
    Proximal,
    /// Transverse decompositions of words along the rank-one geodesic.
    Decompose,
    /// Bent generator images with relator and density verdicts.
    Bend,
    /// Deviation of Cartan projections under a deformation.
    Stability,
    /// Margins of a word ball against a cone.
    Properness,
    /// Writes a shipped example input.
    Example {
        /// One of the shipped example names; `list` prints them.
        name: String,
    },
}

fn parse_field(s: &str) -> Result<FieldDesc, String> {
    s.parse().map_err(|e: cartanlab::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers;
    match cartanlab::par::with_workers(workers, || commands::run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cartanlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
