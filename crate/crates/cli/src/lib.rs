//! The `evalkit` command line.
//!
//! Results go to standard output as JSON; files go to the output directory.
//! Failures print one JSON line to standard error and exit with 2 (usage),
//! 3 (I/O), 4 (validation) or 5 (numeric).

pub mod analyze;
pub mod config;
pub mod error;
pub mod evaluate;
pub mod output;
pub mod stats;

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use crate::analyze::{EqArgs, SpectraArgs};
use crate::config::{resolve_output_dir, EvalConfig, EvalFlags};
pub use crate::error::{CliError, CliResult};
use crate::output::to_json;
use crate::stats::StatsCommand;

#[derive(Debug, Parser)]
#[command(name = "evalkit", version, about = "Evaluate synthetic image corpora against real ones")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full report: FID, KID, EQ-T, EQ-R, spectra and their divergence
    Evaluate(EvalFlags),
    /// Statistics over a `step,value` training log
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Average power spectra, heatmaps and 0/45 degree slices
    Spectra(SpectraArgs),
    /// Translation and rotation equivariance of a built-in operator
    Eq(EqArgs),
    /// Human Turing-test service
    #[command(subcommand)]
    Turing(TuringCommand),
}

#[derive(Debug, Subcommand)]
pub enum TuringCommand {
    /// Serve the HTTP API until interrupted
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Event log [default: <output dir>/turing-events.jsonl]
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

/// Runs one command and returns what it prints on success.
pub fn execute(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Evaluate(flags) => {
            let cfg = EvalConfig::from_flags(flags)?;
            Ok(to_json(&evaluate::evaluate(&cfg)?.report))
        }
        Command::Stats(cmd) => Ok(to_json(&stats::run(cmd)?)),
        Command::Spectra(args) => Ok(to_json(&analyze::spectra(args)?)),
        Command::Eq(args) => Ok(to_json(&analyze::eq(args)?)),
        Command::Turing(TuringCommand::Serve { addr, log }) => {
            let log = match log {
                Some(p) => p.clone(),
                None => {
                    let dir = resolve_output_dir(None);
                    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
                    dir.join("turing-events.jsonl")
                }
            };
            let service = Arc::new(evalkit_turing::TuringService::open(&log)?);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::io(&log, e))?;
            eprintln!("{}", serde_json::json!({ "listening": addr.to_string(), "log": log }));
            runtime.block_on(evalkit_turing::serve(*addr, service)).map_err(|e| CliError::io(&log, e))?;
            Ok(String::new())
        }
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

/// Parses `args`, runs, and reports. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            emit(&e.to_string());
            return 0;
        }
        Err(e) => {
            let message = e.kind().to_string();
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or_default().trim_start_matches("error: ");
            let err = CliError::Usage(if first.is_empty() { message } else { first.to_string() });
            eprintln!("{}", err.to_json_line());
            return err.exit_code();
        }
    };
    match execute(&cli) {
        Ok(out) => {
            emit(&out);
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            e.exit_code()
        }
    }
}
