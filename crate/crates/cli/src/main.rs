//! `tempaudit`: label-error detection and temporal fairness audits over
//! timestamped classification snapshots.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tempaudit_cli::commands::{
    cmd_audit, cmd_clean, cmd_simulate, AuditArgs, CleanArgs, OutputFormat, SimulateArgs,
};
use tempaudit_core::EpsilonDirection;

#[derive(Parser)]
#[command(
    name = "tempaudit",
    version,
    about = "Detect label errors and audit timestamped datasets for temporal fairness",
    after_help = "Set TEMPAUDIT_LOG=info (or debug) for progress logging on stderr."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum FormatArg {
    #[default]
    Text,
    Structured,
}

impl From<FormatArg> for OutputFormat {
    fn from(value: FormatArg) -> Self {
        match value {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Structured => OutputFormat::Structured,
        }
    }
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum DirectionArg {
    #[default]
    Shrink,
    Grow,
}

impl From<DirectionArg> for EpsilonDirection {
    fn from(value: DirectionArg) -> Self {
        match value {
            DirectionArg::Shrink => EpsilonDirection::Shrink,
            DirectionArg::Grow => EpsilonDirection::Grow,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Rank label issues in one snapshot file
    Clean {
        /// Snapshot file (`snapshot_<t>.csv`)
        snapshot: PathBuf,
        /// Write the listing here instead of stdout
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: FormatArg,
    },
    /// Audit a snapshot series for completeness, reliability, and fairness
    Audit {
        /// Directory holding `snapshot_<t>` files
        series_dir: PathBuf,
        /// Manifest mapping timestamps to label sets (JSON)
        manifest: PathBuf,
        /// Ground-truth annotations (JSON)
        annotations: PathBuf,
        /// Safety threshold for the change rate; no default
        #[arg(long)]
        pi: f64,
        /// Drift adjustment for temporal error probabilities
        #[arg(long, value_enum, default_value_t)]
        direction: DirectionArg,
        #[arg(long, value_enum, default_value_t)]
        format: FormatArg,
        /// Write the report here instead of stdout
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic drifting series with ground truth
    Simulate {
        /// Output directory for snapshots, manifest, and annotations
        out_dir: PathBuf,
        /// Generator config (JSON); mutually exclusive with --preset
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Named scenario: midwest-1950 or berlin-1990
        #[arg(long)]
        preset: Option<String>,
        /// Override the config's seed
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("TEMPAUDIT_LOG")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Clean {
            snapshot,
            out,
            format,
        } => cmd_clean(&CleanArgs {
            snapshot,
            out,
            format: format.into(),
        }),
        Command::Audit {
            series_dir,
            manifest,
            annotations,
            pi,
            direction,
            format,
            out,
        } => cmd_audit(&AuditArgs {
            series_dir,
            manifest,
            annotations,
            pi,
            direction: direction.into(),
            out,
            format: format.into(),
        }),
        Command::Simulate {
            out_dir,
            config,
            preset,
            seed,
        } => cmd_simulate(&SimulateArgs {
            out_dir,
            config,
            preset,
            seed,
        }),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(error) => {
            eprintln!("error: {error}");
            let mut source = std::error::Error::source(&error);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(2)
        }
    }
}
