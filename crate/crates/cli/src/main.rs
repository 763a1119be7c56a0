use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use exlife_cli::{cmd_diff, cmd_extract, cmd_lifecycle, RunConfig};
use exlife_core::summary::{Limits, Mode};

#[derive(Parser)]
#[command(
    name = "exlife",
    version,
    about = "Exception-aware API lifecycle analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract exception summaries from EXIR files, one report per version.
    Extract {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Write CFG and CDG dot files per method under this directory.
        #[arg(long)]
        dot_dump: Option<PathBuf>,
        #[command(flatten)]
        analysis: Analysis,
    },
    /// Compare two summary reports of adjacent versions.
    Diff {
        old: PathBuf,
        new: PathBuf,
        /// Output file for the change report.
        #[arg(long, default_value = "changes.json")]
        out: PathBuf,
        /// Also write a plain-text rendering next to the JSON.
        #[arg(long)]
        pretty: bool,
    },
    /// Build lifecycle models over EXIR files or summary reports, oldest first.
    Lifecycle {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        analysis: Analysis,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Intra,
    Inter,
}

#[derive(Args)]
struct Analysis {
    #[arg(long, value_enum, default_value = "inter")]
    mode: ModeArg,
    /// Maximum number of pre-paths per throw or call site.
    #[arg(long, default_value_t = Limits::default().path_cap)]
    path_cap: usize,
    /// Times a loop body may be repeated on one path (0 or 1).
    #[arg(long, default_value_t = Limits::default().loop_unroll)]
    loop_unroll: usize,
    /// Maximum number of clauses kept by a conjunction or negation.
    #[arg(long, default_value_t = Limits::default().clause_limit)]
    clause_limit: usize,
    /// Version label per input, in input order; defaults to the file stem.
    #[arg(long = "version-label")]
    version_labels: Vec<String>,
    /// Also write plain-text renderings of the outputs.
    #[arg(long)]
    pretty: bool,
}

impl Analysis {
    fn config(&self) -> RunConfig {
        RunConfig {
            mode: match self.mode {
                ModeArg::Intra => Mode::Intra,
                ModeArg::Inter => Mode::Inter,
            },
            path_cap: self.path_cap,
            loop_unroll: self.loop_unroll,
            clause_limit: self.clause_limit,
            pretty: self.pretty,
            parallel: true,
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract {
            inputs,
            out,
            dot_dump,
            analysis,
        } => {
            let written = cmd_extract(
                &inputs,
                &analysis.version_labels,
                &out,
                &analysis.config(),
                dot_dump.as_deref(),
            )?;
            for p in written {
                println!("{}", p.display());
            }
        }
        Command::Diff {
            old,
            new,
            out,
            pretty,
        } => {
            let report = cmd_diff(&old, &new, &out, pretty)?;
            println!("{}: {} event(s)", out.display(), report.events.len());
        }
        Command::Lifecycle {
            inputs,
            out,
            analysis,
        } => {
            let (life, _) =
                cmd_lifecycle(&inputs, &analysis.version_labels, &out, &analysis.config())?;
            println!(
                "{}: {} API(s) over {} version(s)",
                out.join("lifecycle.json").display(),
                life.apis.len(),
                life.versions.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
