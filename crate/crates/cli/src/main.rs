//! `superlie`: verify catalog claims about nilpotent Lie superalgebras from the command line.

mod commands;
mod selftest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use superlie::catalog::CatalogError;
use superlie::cohomology::CohomologyError;
use superlie::exactla::GroebnerCaps;
use superlie::gamma23::Gamma23Error;
use superlie::orbitrel::OrbitError;
use superlie::{AlgebraError, Rational};

#[derive(Debug, Parser)]
#[command(name = "superlie", version, about = "Exact checks on nilpotent Lie superalgebras of small dimension")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Working precision `O(t^p)` for series computations.
    #[arg(long, global = true, env = "SUPERLIE_PRECISION", value_parser = parse_precision)]
    precision: Option<Rational>,
    /// Worker threads for batch commands (0 picks the core count).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Cap on Gröbner basis size in the trivial-subalgebra search.
    #[arg(long, global = true)]
    groebner_max_basis: Option<usize>,
    /// Cap on Gröbner polynomial degree in the trivial-subalgebra search.
    #[arg(long, global = true)]
    groebner_max_degree: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List catalog entries, optionally of one shape.
    List { m: Option<usize>, n: Option<usize> },
    /// Print the brackets of an algebra.
    Show { algebra: String },
    /// Check skew-symmetry, the Jacobi identity and nilpotency.
    Check { algebra: String },
    /// Center, derived algebra, orbit dimension and the other invariants.
    Invariants { algebra: String },
    /// Even second cohomology with coefficients in the adjoint module.
    H2 { algebra: String },
    /// Verify a degeneration witness.
    Degenerate {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Witness JSON file; defaults to the built-in table row.
        #[arg(long)]
        witness: Option<String>,
    },
    /// Search for a certificate that `from` does not degenerate to `to`.
    Nondegen {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Hasse diagram of the orbit closures of one shape.
    Hasse {
        m: usize,
        n: usize,
        /// Write DOT to this path, or `-` for stdout.
        #[arg(long)]
        dot: Option<String>,
    },
    /// Irreducible components of one shape.
    Components { m: usize, n: usize },
    /// Classify a pair of symmetric 3x3 matrices.
    Gamma23 {
        /// JSON array of rows of scalar texts.
        #[arg(long)]
        g1: String,
        #[arg(long)]
        g2: String,
    },
    /// Run every check for one shape against the listed tables.
    VerifyAll { m: usize, n: usize },
    /// Seeded randomized checks of the arithmetic and the algebra engines.
    Selftest {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Output {
    Human,
    Json,
}

#[derive(Debug, Clone)]
pub struct CliConfig {
    pub precision: Rational,
    pub parallelism: usize,
    pub output: Output,
    pub caps: GroebnerCaps,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Gamma23(#[from] Gamma23Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Orbit(OrbitError::ConsistencyViolation(_)) => 3,
            CliError::Orbit(OrbitError::InsufficientPrecision(_)) => 1,
            _ => 2,
        }
    }
}

/// What a command found: `ok` selects exit code 0 or 1.
pub struct Report {
    pub ok: bool,
    pub text: String,
    pub json: serde_json::Value,
}

fn parse_precision(s: &str) -> Result<Rational, String> {
    let p: Rational = s.trim().parse().map_err(|_| format!("`{s}` is not a rational number"))?;
    if p <= Rational::from_integer(0.into()) {
        return Err(format!("precision must be positive, got {s}"));
    }
    Ok(p)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let defaults = GroebnerCaps::default();
    let config = CliConfig {
        precision: cli.precision.unwrap_or_else(superlie::series::default_precision),
        parallelism: cli.jobs,
        output: if cli.json { Output::Json } else { Output::Human },
        caps: GroebnerCaps {
            max_basis: cli.groebner_max_basis.unwrap_or(defaults.max_basis),
            max_degree: cli.groebner_max_degree.unwrap_or(defaults.max_degree),
        },
    };
    if config.parallelism > 0 {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(config.parallelism).build_global();
    }
    match commands::run(cli.command, &config) {
        Ok(report) => {
            match config.output {
                Output::Human => print!("{}", report.text),
                Output::Json => {
                    println!("{}", serde_json::to_string_pretty(&report.json).expect("json values serialize"))
                }
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
