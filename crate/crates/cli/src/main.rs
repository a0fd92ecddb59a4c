//! Command line front end for the mode engine. Subcommands check scenario
//! files, replay evidence streams into CSV and SVG outputs, and print
//! nerves and face graphs.

mod commands;
mod config;
mod evidence;
mod render;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use modal_core::simplicial::GraphRelation;

/// Exit code 1 marks content that parsed but fails the rules; exit code 2
/// marks files that could not be read or parsed at all.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}", path = .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Format(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Format(_) => 2,
            CliError::Validation(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "modal",
    version,
    about = "Simplicial mode systems over evidence streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file and print a summary of its complex
    Validate { config: PathBuf },
    /// Replay an evidence stream and write trajectory.csv, events.csv and
    /// trace.svg into the output directory
    Run {
        config: PathBuf,
        evidence: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the maximal faces of the nerve of a cover
    Nerve { cover: PathBuf },
    /// Print the face graph of a scenario's complex
    Graph {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = RelationArg::Hasse)]
        relation: RelationArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RelationArg {
    /// Edges between faces one dimension apart
    Hasse,
    /// Edges between all proper containments
    All,
}

impl From<RelationArg> for GraphRelation {
    fn from(arg: RelationArg) -> Self {
        match arg {
            RelationArg::Hasse => GraphRelation::Hasse,
            RelationArg::All => GraphRelation::All,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { config } => commands::cmd_validate(&config),
        Command::Run {
            config,
            evidence,
            out,
        } => commands::cmd_run(&config, &evidence, &out).map(|()| String::new()),
        Command::Nerve { cover } => commands::cmd_nerve(&cover),
        Command::Graph { config, relation } => commands::cmd_graph(&config, relation.into()),
    };
    match result {
        Ok(report) => emit(&report),
        Err(error) => {
            eprintln!("error: {error}");
            std::process::exit(error.exit_code());
        }
    }
}

/// Reports go out in one write. A reader that hangs up early (head, less)
/// ends the program quietly instead of panicking mid-print.
fn emit(report: &str) {
    use std::io::Write as _;
    let mut stdout = std::io::stdout().lock();
    let outcome = stdout
        .write_all(report.as_bytes())
        .and_then(|()| stdout.flush());
    if let Err(error) = outcome {
        if error.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {error}");
        std::process::exit(2);
    }
}
