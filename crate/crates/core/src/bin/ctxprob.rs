use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ctxprob::canonical::to_canonical_string;
use ctxprob::interference::Branch;
use ctxprob::model::{generate_kq, generate_random_model, Model, RandomConstraints};
use ctxprob::report::{analyze, kq_reproduction, represent};
use ctxprob::verify::{verify_model, Suite, VerifyOptions};
use ctxprob::Error;

#[derive(Parser)]
#[command(name = "ctxprob", version, about = "Contextual probability models and their Hilbert-space representations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Replace the default report tolerance of `verify` and `example kq`.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Principal,
    Conjugate,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Principal => Branch::Principal,
            BranchArg::Conjugate => Branch::Conjugate,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Interference coefficients, classes and phases per context.
    Analyze {
        model: PathBuf,
        #[arg(long)]
        context: Option<String>,
    },
    /// Complex and hyperbolic amplitudes with operator matrices.
    Represent {
        model: PathBuf,
        #[arg(long)]
        context: Option<String>,
        #[arg(long, value_enum, default_value_t = BranchArg::Principal)]
        branch: BranchArg,
        /// Context at which the a-basis is built.
        #[arg(long)]
        anchor: Option<String>,
    },
    /// Brute-force check of every representation identity.
    Verify {
        model: PathBuf,
        #[arg(long, default_value = "all")]
        suite: Suite,
    },
    /// Built-in worked examples.
    Example {
        #[command(subcommand)]
        which: Example,
    },
    /// Model generators.
    Gen {
        #[command(subcommand)]
        which: Generator,
    },
}

#[derive(Subcommand)]
enum Example {
    /// The four-point model with weights (q, 1/2 − q, q, 1/2 − q).
    Kq {
        #[arg(long)]
        q: f64,
        /// Scale of the sum observable γ(a + b).
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
}

#[derive(Subcommand)]
enum Generator {
    /// The four-point model document for a given q.
    Kq {
        #[arg(long)]
        q: f64,
    },
    /// A seeded random model document.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        points: usize,
        #[arg(long, default_value_t = 2)]
        arity_a: usize,
        #[arg(long, default_value_t = 2)]
        arity_b: usize,
        /// Require P(b|a) to be double stochastic.
        #[arg(long, conflicts_with = "not_double_stochastic")]
        double_stochastic: bool,
        /// Require P(b|a) not to be double stochastic.
        #[arg(long)]
        not_double_stochastic: bool,
        /// Require every cell A_y ∩ B_x to have positive probability.
        #[arg(long)]
        incompatible: bool,
    },
}

enum Failure {
    /// The computation ran and a check failed.
    Verification,
    /// The input could not be loaded or the request was invalid.
    Input(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    error: &'a str,
    message: String,
}

fn emit<T: Serialize + Display>(g: &Global, report: &T) -> Result<(), Failure> {
    let text = match g.format {
        Format::Json => to_canonical_string(report).map_err(|e| Failure::Io(e.into()))?,
        Format::Text => report.to_string(),
    };
    write_out(g, &text)
}

fn write_out(g: &Global, text: &str) -> Result<(), Failure> {
    match &g.output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match cli.command {
        Command::Analyze { model, context } => {
            let m = Model::load(&model)?;
            emit(g, &analyze(&m, context.as_deref())?)
        }
        Command::Represent {
            model,
            context,
            branch,
            anchor,
        } => {
            let m = Model::load(&model)?;
            emit(g, &represent(&m, context.as_deref(), branch.into(), anchor.as_deref())?)
        }
        Command::Verify { model, suite } => {
            let m = Model::load(&model)?;
            let report = verify_model(&m, suite, VerifyOptions { tolerance: g.tolerance });
            emit(g, &report)?;
            if report.ok() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Example {
            which: Example::Kq { q, gamma },
        } => {
            let mut r = kq_reproduction(q, gamma)?;
            if let Some(t) = g.tolerance {
                r = r.with_tolerance(t);
            }
            emit(g, &r)?;
            if r.ok() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Gen {
            which: Generator::Kq { q },
        } => write_out(g, &generate_kq(q)?.to_canonical_json()),
        Command::Gen {
            which:
                Generator::Random {
                    seed,
                    points,
                    arity_a,
                    arity_b,
                    double_stochastic,
                    not_double_stochastic,
                    incompatible,
                },
        } => {
            let constraints = RandomConstraints {
                double_stochastic: match (double_stochastic, not_double_stochastic) {
                    (true, _) => Some(true),
                    (_, true) => Some(false),
                    _ => None,
                },
                incompatible,
            };
            let doc = generate_random_model(seed, points, [arity_a, arity_b], constraints)?;
            write_out(g, &doc.to_canonical_json())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            diagnose(e.code(), e.to_string());
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            diagnose("io", e.to_string());
            ExitCode::from(2)
        }
    }
}

fn diagnose(code: &str, message: String) {
    let d = Diagnostic { error: code, message };
    let line = serde_json::to_string(&d).expect("diagnostic serializes");
    eprintln!("{line}");
}
