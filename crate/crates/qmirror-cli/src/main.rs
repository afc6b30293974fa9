//! Command line runner for the qubit-mirror feedback model: time traces,
//! one-parameter sweeps, and canned figure presets, as CSV or SVG.

mod config;
mod presets;
mod report;
mod svg;
mod table;

use std::io::Write;
use std::path::Path;

use clap::Parser;

use config::{CommonOpts, Format, Layer, RunConfig, SweepOpts};
use table::Table;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config or parameters; exits 1.
    #[error("{0}")]
    Invalid(String),
    /// The cross-check integrator disagreed; exits 2.
    #[error("verification failed: {0}")]
    Verification(String),
    /// Filesystem trouble; exits 1.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 2,
            CliError::Invalid(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<qmirror::Error> for CliError {
    fn from(e: qmirror::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "simulate",
    version,
    about = "Delayed-feedback qubit simulator: traces, sweeps and figure presets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand, Debug)]
enum Command {
    /// Time trace of the excited amplitude and its diagnostics
    Trace {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Scalar measures over a one-parameter grid
    Sweep {
        #[command(flatten)]
        sweep: SweepOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Canned parameter studies fig2..fig7
    Preset {
        /// Preset name, fig2..fig7
        name: String,
        /// Override the grid density of a sweep preset
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version go to stdout and exit clean; anything else is
            // an input error, which this tool reports with exit code 1.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (table, cfg) = match cli.command {
        Command::Trace { common } => {
            let cfg = RunConfig::resolve(&common, None, Layer::default())?;
            (report::run_trace(&cfg)?, cfg)
        }
        Command::Sweep { sweep, common } => {
            let cfg = RunConfig::resolve(&common, Some(&sweep), Layer::default())?;
            (report::run_sweep(&cfg)?, cfg)
        }
        Command::Preset {
            name,
            count,
            common,
        } => presets::run(&name, count, &common)?,
    };
    emit(&table, &cfg)
}

fn emit(table: &Table, cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.format {
        Format::Csv => match &cfg.output {
            Some(path) => table.write_csv_atomic(path),
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                match table.write_csv(&mut lock) {
                    // A closed pipe (head, less quit early) is not an error.
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    other => other.map_err(|e| CliError::Io(e.to_string())),
                }
            }
        },
        Format::Svg => {
            let doc = svg::emit_svg(table)?;
            match &cfg.output {
                Some(path) => write_text_atomic(path, &doc),
                None => {
                    print!("{doc}");
                    Ok(())
                }
            }
        }
    }
}

fn write_text_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::Io(e.to_string()))?;
    tmp.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(e.to_string()))?;
    tmp.persist(path).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}
