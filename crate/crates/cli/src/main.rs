//! `qusense`: runs the simulation studies from JSON configs.
//!
//! ```text
//! qusense <experiment> --config <path> [--out <dir>] [--seed <u64>] [--format csv|json]
//! qusense validate --config <path>
//! ```
//!
//! Exit codes: 0 success, 1 I/O failure, 2 malformed config, 3 numeric
//! invariant violation. Failures print one JSON error record on stderr.

mod config;
mod experiments;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use config::{Config, Diagnostic, Experiment, Format, DEFAULT_SEED};
use experiments::RunError;

#[derive(Parser)]
#[command(name = "qusense", version, about = "QFT-based quantum sensing simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Readout image of the phase ladder under the QFT and local-Hadamard mappings.
    Digitize(RunArgs),
    /// AC-field phase estimation: outcome staircase and estimator spread.
    Acfield(RunArgs),
    /// Two-target correlation spectroscopy.
    Correlate(RunArgs),
    /// Quantum and classical Fisher information per strategy.
    Fisher(RunArgs),
    /// Purity after full dephasing per mapping.
    Purity(RunArgs),
    /// Check a config and list every problem without running it.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's `output`, else the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    config: PathBuf,
}

enum Failure {
    Config(Vec<Diagnostic>),
    Invariant(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }

    fn record(&self) -> serde_json::Value {
        let code = self.exit_code();
        match self {
            Failure::Config(d) => json!({"error": "config", "exit_code": code, "diagnostics": d}),
            Failure::Invariant(m) => json!({"error": "invariant", "exit_code": code, "message": m}),
            Failure::Io(m) => json!({"error": "io", "exit_code": code, "message": m}),
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Input(e) => Failure::Config(vec![Diagnostic::new("", "invalid_value", e.to_string())]),
            RunError::Invariant(m) => Failure::Invariant(m),
        }
    }
}

fn read_config(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| {
        Failure::Config(vec![Diagnostic::new(
            "",
            "unreadable",
            format!("cannot read {}: {e}", path.display()),
        )])
    })
}

fn parse_config(bytes: &[u8], expected: Option<Experiment>) -> Result<Config, Failure> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Failure::Config(vec![Diagnostic::new("", "parse_error", format!("config is not UTF-8: {e}"))]))?;
    config::parse(text, expected).map_err(Failure::Config)
}

/// `QUSENSE_THREADS`, if set.
fn thread_cap() -> Result<Option<usize>, Failure> {
    match std::env::var("QUSENSE_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Failure::Config(vec![Diagnostic::new(
                "QUSENSE_THREADS",
                "invalid_value",
                format!("must be a positive integer, got '{s}'"),
            )])),
        },
    }
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(cap: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match cap {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Io(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T: Send>(_cap: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    Ok(f())
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(format!("cannot write {}: {e}", path.display()));
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(contents).map_err(io)
}

fn run(experiment: Experiment, args: &RunArgs) -> Result<(), Failure> {
    let bytes = read_config(&args.config)?;
    let cfg = parse_config(&bytes, Some(experiment))?;
    let cap = thread_cap()?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let format = args.format.or(cfg.format).unwrap_or_default();
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let tables = with_threads(cap, || experiments::run(&cfg.settings, seed))??;

    fs::create_dir_all(&out_dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut files = Vec::new();
    for (stem, table) in &tables {
        let name = format!("{stem}.{}", format.extension());
        let body = match format {
            Format::Csv => table.to_csv_string().into_bytes(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&table.to_json()).expect("tables serialize");
                s.push('\n');
                s.into_bytes()
            }
        };
        write_file(&out_dir.join(&name), &body)?;
        files.push(name);
    }
    let meta = json!({
        "experiment": experiment.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config_sha256": format!("{:x}", Sha256::digest(&bytes)),
        "seed": seed,
        "format": format.extension(),
        "files": files,
    });
    let mut text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    text.push('\n');
    write_file(&out_dir.join(format!("{}.meta.json", experiment.name())), text.as_bytes())
}

fn validate(args: &ValidateArgs) -> Result<(), Failure> {
    let bytes = read_config(&args.config)?;
    let result = parse_config(&bytes, None);
    let (valid, diagnostics) = match &result {
        Ok(_) => (true, Vec::new()),
        Err(Failure::Config(d)) => (false, d.clone()),
        Err(_) => unreachable!("parsing only fails with config diagnostics"),
    };
    let report = json!({"valid": valid, "diagnostics": diagnostics});
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    result.map(|_| ())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Digitize(a) => run(Experiment::Digitize, a),
        Command::Acfield(a) => run(Experiment::Acfield, a),
        Command::Correlate(a) => run(Experiment::Correlate, a),
        Command::Fisher(a) => run(Experiment::Fisher, a),
        Command::Purity(a) => run(Experiment::Purity, a),
        Command::Validate(a) => validate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.record());
            ExitCode::from(f.exit_code())
        }
    }
}
