//! Command-line driver: scenario loading, execution and report emission.
//!
//! Exit codes: 0 when every check passes, 2 when a check fails, 1 on I/O,
//! parse or validation errors (nothing is written in that case).

mod jobs;
mod render;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::Value;

pub use jobs::{builtin_jobs, load_scenarios, Job, JobKind, Outcome, Scenario};

use crate::error::{Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Tolerance override for exact identities and certificates.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Polynomial degree or Gram truncation degree `d`.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Derivative order `n` or moment order `S`.
    #[arg(long, global = true)]
    pub order: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads across scenarios.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    /// Scenario file, or `builtin` for the seeded corpus.
    #[arg(long, global = true, default_value = "builtin")]
    pub corpus: String,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(
    name = "dsl",
    version,
    about = "Dirichlet-type spaces, m-isometries and moment recovery"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity suite over the corpus (JSON lines).
    Verify,
    /// Recover moments and certify the Gram round trip.
    Recover {
        #[arg(long, conflicts_with = "operator")]
        tuple: Option<PathBuf>,
        #[arg(long)]
        operator: Option<PathBuf>,
        /// Isometric order; defaults to the tuple's `m` or the classified order.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Classify an operator matrix.
    Classify {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long, default_value_t = crate::operators::DEFAULT_CAP)]
        cap: usize,
    },
    /// Emit the Gram matrix of a tuple.
    Gram {
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Wold-type splitting of an operator matrix.
    Wold {
        #[arg(long)]
        operator: PathBuf,
    },
    /// Compare the refined integral with the dilated coefficient form.
    Quadrature {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        polynomial: PathBuf,
        #[arg(long, default_value_t = 0.9)]
        radius: f64,
    },
}

fn command_jobs(cmd: &Command, g: &GlobalArgs) -> Result<(Vec<Job>, bool)> {
    let one = |s: Scenario| -> Result<Vec<Job>> { Ok(vec![s.load(Path::new("."))?]) };
    let base = Scenario::empty;
    Ok(match cmd {
        Command::Verify => {
            if g.corpus == "builtin" {
                (builtin_jobs(g.seed), true)
            } else {
                (load_scenarios(Path::new(&g.corpus))?, true)
            }
        }
        Command::Recover { tuple, operator, m } => {
            let mut s = base(JobKind::Recover);
            s.tuple = tuple.as_ref().map(|p| p.display().to_string());
            s.operator = operator.as_ref().map(|p| p.display().to_string());
            if s.tuple.is_none() && s.operator.is_none() {
                return Err(Error::Parse("recover: one of --tuple or --operator is required".into()));
            }
            s.m = *m;
            (one(s)?, false)
        }
        Command::Classify { operator, cap } => {
            let mut s = base(JobKind::Classify);
            s.operator = Some(operator.display().to_string());
            s.cap = Some(*cap);
            (one(s)?, false)
        }
        Command::Gram { tuple } => {
            let mut s = base(JobKind::Gram);
            s.tuple = Some(tuple.display().to_string());
            (one(s)?, false)
        }
        Command::Wold { operator } => {
            let mut s = base(JobKind::Wold);
            s.operator = Some(operator.display().to_string());
            (one(s)?, false)
        }
        Command::Quadrature {
            measure,
            polynomial,
            radius,
        } => {
            let mut s = base(JobKind::Quadrature);
            s.measure = Some(measure.display().to_string());
            s.polynomial = Some(polynomial.display().to_string());
            s.radius = Some(*radius);
            (one(s)?, false)
        }
    })
}

/// Runs every job on a pool of `threads` workers, keeping job order.
pub fn execute(jobs: &[Job], g: &GlobalArgs, threads: usize) -> Result<Vec<Outcome>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    pool.install(|| jobs.par_iter().map(|j| j.run(g)).collect())
}

/// Serializes outcomes: JSON lines for streams, one document otherwise.
pub fn render(outcomes: &[Outcome], stream: bool, format: OutputFormat) -> String {
    let records: Vec<&Value> = outcomes.iter().flat_map(|o| o.records.iter()).collect();
    match format {
        OutputFormat::Text => render::text(&records, std::env::var_os("DSL_NO_COLOR").is_none()),
        OutputFormat::Json if stream => {
            let mut s = String::new();
            for r in records {
                s.push_str(&serde_json::to_string(r).expect("serializable"));
                s.push('\n');
            }
            s
        }
        OutputFormat::Json => {
            let doc = if records.len() == 1 {
                records[0].clone()
            } else {
                Value::Array(records.into_iter().cloned().collect())
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
    }
}

fn run_parsed(cli: &Cli) -> Result<(i32, String)> {
    let (jobs, stream) = command_jobs(&cli.command, &cli.global)?;
    let outcomes = execute(&jobs, &cli.global, cli.global.jobs)?;
    let pass = outcomes.iter().all(|o| o.pass);
    Ok((
        if pass { EXIT_PASS } else { EXIT_FAIL },
        render(&outcomes, stream, cli.global.output),
    ))
}

/// Entry point shared by the binary and the tests.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_ERROR;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_PASS;
        }
    };
    match run_parsed(&cli) {
        Ok((code, text)) => {
            let written = match &cli.global.out {
                Some(path) => crate::io::write_atomic(path, text.as_bytes()),
                None => stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| Error::Parse(format!("stdout: {e}"))),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    EXIT_ERROR
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}
