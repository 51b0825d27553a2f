//! `compsize`: component size distributions of configuration networks.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use input::InputArgs;

#[derive(Debug, Parser)]
#[command(name = "compsize", version, about = "Component size distributions of configuration networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact component size distribution w(1..N).
    Compute(Common),
    /// Closed-form w(n) for the exponential, geometric and binomial families.
    ClosedForm {
        #[command(flatten)]
        common: Common,
        /// Use the binomial expression as commonly printed instead of the derived one.
        #[arg(long)]
        as_printed: bool,
    },
    /// Asymptotic regime, its constants and the asymptote over 1..N.
    Asymptote(Common),
    /// Moments, criticality parameter and asymptotic regime.
    Classify(Common),
    /// Compares w(n) with a reference and fits the log-log slope.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        reference: Reference,
        /// Previous `compute --format json` output, for `--reference file`.
        #[arg(long)]
        reference_file: Option<PathBuf>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Monte Carlo ensemble of finite networks.
    Sample {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Giant component fraction 1 - sum w(n) - tail.
    Giant(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Reference {
    ClosedForm,
    Asymptote,
    MonteCarlo,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Machine mode: nothing but data on standard output, no notes on standard error.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Clone, Args)]
struct Common {
    #[command(flatten)]
    input: InputArgs,

    /// Largest component size n.
    #[arg(short = 'N', long = "horizon", default_value_t = 1000)]
    horizon: usize,

    /// Slope-fit window [A, B] in component size.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    window: Option<Vec<usize>>,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
struct McArgs {
    /// Nodes per sampled network.
    #[arg(long = "nodes", default_value_t = 100_000)]
    nodes: usize,

    /// Number of replicas.
    #[arg(short = 'R', long = "replicas", default_value_t = 10)]
    replicas: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A failure reported as JSON on standard error.
pub struct Failure {
    code: u8,
    payload: Value,
    report: Option<Value>,
}

impl From<compsize::Error> for Failure {
    fn from(e: compsize::Error) -> Self {
        let code = if matches!(e, compsize::Error::Unclassifiable { .. }) { 3 } else { 2 };
        Failure { code, payload: json!({"error": e.kind(), "message": e.to_string()}), report: None }
    }
}

impl Failure {
    fn io(message: String) -> Self {
        Failure { code: 2, payload: json!({"error": "Io", "message": message}), report: None }
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", json!({"error": "Usage", "message": e.to_string().trim_end()}));
            return ExitCode::from(2);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Some(report) = f.report {
                println!("{report}");
            }
            eprintln!("{}", f.payload);
            ExitCode::from(f.code)
        }
    }
}
