//! `tdesign` command-line driver.

mod commands;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tdesign::sampler::StepRule;
use tdesign::FieldContext;

#[derive(Parser, Debug)]
#[command(name = "tdesign", version, about = "Clifford 3-design sampling via transvections and Kerdock sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Options {
    /// Number of qubits, the field degree.
    #[arg(long, global = true, default_value_t = 3)]
    pub m: usize,
    /// Primitive polynomial in hex, e.g. 0xb for x^3 + x + 1.
    #[arg(long, global = true, value_parser = parse_hex)]
    pub poly: Option<u32>,
    /// Target design accuracy.
    #[arg(long, global = true, conflicts_with = "steps")]
    pub epsilon: Option<f64>,
    /// Fixed number of transvections, instead of deriving it from epsilon.
    #[arg(long, global = true)]
    pub steps: Option<u64>,
    #[arg(long, global = true, env = "TDESIGN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Number of samples; the default depends on the subcommand.
    #[arg(long, global = true)]
    pub count: Option<u64>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Field parameters: polynomial, Gram matrix, trace and dual-basis table.
    FieldInfo,
    /// Edge and orbit census of the Pauli graph.
    GraphCensus,
    /// Orbit transition matrices with closed-form and structure checks.
    Chain,
    /// Eigenvalues of the orbit chains and mixing-time bounds.
    Spectra,
    /// Total-variation curves from every point-mass start.
    Convergence,
    /// Stream design samples as JSON lines.
    Sample,
    /// Dense-unitary oracle checks and pair-mixing statistics.
    Verify,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub const DEFAULT_EPSILON: f64 = 0.01;

impl Options {
    pub fn step_rule(&self) -> StepRule {
        match (self.steps, self.epsilon) {
            (Some(t), _) => StepRule::Steps(t),
            (None, eps) => StepRule::Epsilon(eps.unwrap_or(DEFAULT_EPSILON)),
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(DEFAULT_EPSILON)
    }

    pub fn context(&self) -> Result<FieldContext, CliError> {
        Ok(FieldContext::new(self.m, self.poly)?)
    }
}

fn parse_hex(s: &str) -> Result<u32, String> {
    let digits = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
    u32::from_str_radix(digits, 16).map_err(|e| format!("{s:?} is not a hex polynomial: {e}"))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Library(tdesign::Error),
    Io(io::Error),
}

impl From<tdesign::Error> for CliError {
    fn from(e: tdesign::Error) -> Self {
        use tdesign::Error::*;
        match e {
            DegreeOutOfRange(_) | PolynomialDegree { .. } | Reducible { .. } | NotPrimitive { .. } | TooLarge { .. } | Epsilon(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Library(other),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Result of a subcommand: the artifact is already written; failed checks
/// are listed here.
#[derive(Default)]
pub struct Outcome {
    pub failures: Vec<String>,
}

fn open_output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(n) = cli.opts.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let mut out = open_output(&cli.opts.out)?;
    let outcome = match cli.command {
        Command::FieldInfo => commands::field_info(&cli.opts, &mut out),
        Command::GraphCensus => commands::graph_census(&cli.opts, &mut out),
        Command::Chain => commands::chain(&cli.opts, &mut out),
        Command::Spectra => commands::spectra(&cli.opts, &mut out),
        Command::Convergence => commands::convergence(&cli.opts, &mut out),
        Command::Sample => commands::sample(&cli.opts, &mut out),
        Command::Verify => verify::verify(&cli.opts, &mut out),
    }?;
    out.flush()?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) if outcome.failures.is_empty() => ExitCode::SUCCESS,
        Ok(outcome) => {
            let doc = serde_json::json!({ "failures": outcome.failures });
            eprintln!("{doc}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Library(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
