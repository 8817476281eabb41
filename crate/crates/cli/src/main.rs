//! `wexfab`: validate and run extraction tasks, learn and apply wrappers,
//! evaluate and apply adaptation policies.
//!
//! Exit status: 0 on success, 1 when the input is rejected or a step
//! fails, 2 on a usage error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "wexfab", version, about = "Web information extraction fabric")]
struct Cli {
    /// Print the engine trace and progress details on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a task description and print its diagnostics.
    Validate { task: PathBuf },
    /// Compile and run a task, printing the run report as JSON.
    Run {
        task: PathBuf,
        #[command(flatten)]
        fetch: FetchArgs,
        /// Write the report here instead of stdout.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Learn a wrapper from a corpus and example instances.
    Learn {
        /// Directory of documents, read in file name order.
        #[arg(long, value_name = "DIR")]
        corpus: PathBuf,
        /// JSON Lines file, one object of field -> value per example.
        #[arg(long, value_name = "FILE")]
        examples: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Apply a wrapper to every document of a directory.
    Extract {
        #[arg(long, value_name = "FILE")]
        wrapper: PathBuf,
        #[arg(long, value_name = "DIR")]
        docs: PathBuf,
        /// Records as JSON Lines; stdout when absent.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Score a wrapper against known records and print a results table.
    Eval {
        #[arg(long, value_name = "FILE")]
        wrapper: PathBuf,
        #[arg(long, value_name = "DIR")]
        docs: PathBuf,
        /// JSON Lines file of the records the documents hold.
        #[arg(long, value_name = "FILE")]
        truth: PathBuf,
        /// Row label; defaults to the document directory name.
        #[arg(long)]
        source: Option<String>,
        /// Number of examples the wrapper was learned from, for the table.
        #[arg(long, value_name = "N", default_value_t = 0)]
        example_count: usize,
        /// One JSON object per row instead of a table.
        #[arg(long)]
        jsonl: bool,
    },
    /// Adaptation policies.
    #[command(subcommand)]
    Policy(PolicyCommand),
}

#[derive(Debug, Subcommand)]
enum PolicyCommand {
    /// Evaluate a system policy and print the actions it triggers.
    Eval {
        #[arg(long, value_name = "FILE")]
        policy: PathBuf,
        /// `path = value` lines.
        #[arg(long, value_name = "FILE")]
        props: PathBuf,
        /// Print the plan as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Plan a policy against a task and registry snapshot, then apply it.
    Apply {
        #[arg(long, value_name = "FILE")]
        policy: PathBuf,
        /// Installed task. Read and rewritten for system policies; written
        /// for extraction directives.
        #[arg(long, value_name = "FILE")]
        task: PathBuf,
        /// Registry snapshot, rewritten unless `--dry-run`.
        #[arg(long, value_name = "FILE")]
        registry: PathBuf,
        /// Property file; required by system policies.
        #[arg(long, value_name = "FILE")]
        props: Option<PathBuf>,
        #[command(flatten)]
        fetch: FetchArgs,
        /// Print the plan without changing any file.
        #[arg(long)]
        dry_run: bool,
    },
}

#[derive(Debug, Args)]
struct FetchArgs {
    /// Serve every request from this fixture directory.
    #[arg(long, value_name = "DIR", env = "WEXFAB_FIXTURES")]
    offline: Option<PathBuf>,
}

/// Failure attributable to how the command was invoked.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::dispatch(cli) {
        Ok(code) => code,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
