//! `qaept`: config-driven experiments on damped and time-dependent quantum
//! oscillators.

mod commands;
mod config;
mod error;
mod output;
mod parallel;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Ctx, Direction, Outcome};
use config::{Format, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "qaept", version, about = "Arnold-Ermakov-Pinney maps, invariants and oracle propagation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Configuration file of `section.key = value` lines.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `outputs.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output formats; override `outputs.formats`.
    #[arg(long, value_enum, value_delimiter = ',')]
    format: Vec<FormatArg>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Bin,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical classical basis, Wronskian, auxiliary b(t) and zero counts.
    Classical(Common),
    /// Exact invariant eigenstates and spectra.
    Eigenstates {
        #[command(flatten)]
        common: Common,
        /// Highest eigenstate index; overrides `eigenstates.n_max`.
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Maps a stored state to or from the auxiliary system.
    Map {
        #[command(flatten)]
        common: Common,
        /// State in the binary dump format.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "forward")]
        direction: Direction,
    },
    /// Invariant matrices: invariance residuals, hermiticity, spectra.
    Invariant(Common),
    /// Crank-Nicolson propagation with trajectory export.
    Propagate(Common),
    /// Runs the property suite and writes a pass/fail report.
    Verify(Common),
}

fn execute(cli: Cli) -> Result<(Outcome, PathBuf), CliError> {
    let (common, n_max, input, direction) = match &cli.command {
        Command::Classical(c) | Command::Invariant(c) | Command::Propagate(c) | Command::Verify(c) => {
            (c, None, None, Direction::Forward)
        }
        Command::Eigenstates { common, n_max } => (common, *n_max, None, Direction::Forward),
        Command::Map { common, input, direction } => (common, None, Some(input.clone()), *direction),
    };
    let threads = parallel::thread_cap()?;
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if !common.format.is_empty() {
        let mut f: Vec<Format> = common
            .format
            .iter()
            .map(|f| match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
                FormatArg::Bin => Format::Bin,
            })
            .collect();
        f.sort();
        f.dedup();
        cfg.formats = f;
    }
    if let Some(n) = n_max {
        cfg.eigen.n_max = n;
    }
    let ctx = Ctx { cfg: &cfg, threads, input, direction };
    let outcome = match cli.command {
        Command::Classical(_) => commands::classical::run(&ctx)?,
        Command::Eigenstates { .. } => commands::eigenstates::run(&ctx)?,
        Command::Map { .. } => commands::map::run(&ctx)?,
        Command::Invariant(_) => commands::invariant::run(&ctx)?,
        Command::Propagate(_) => commands::propagate::run(&ctx)?,
        Command::Verify(_) => commands::verify::run(&ctx)?,
    };
    outcome.staged.write(&cfg.out_dir)?;
    Ok((outcome, cfg.out_dir.clone()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok((outcome, _)) => {
            // A closed pipe (e.g. `| head`) is not an error of the run.
            let _ = writeln!(std::io::stdout().lock(), "{}", qaept::io::to_json_string(&outcome.summary).trim_end());
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("qaept: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
