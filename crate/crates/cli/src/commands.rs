//! The three commands: `clean`, `audit`, `simulate`.
//!
//! Exit codes: 0 when the verdict is fair (audit) or no issues were found
//! (clean), 1 when the audit fails or issues exist, 2 for input errors.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempaudit_core::{generate, AuditConfig, DriftConfig, EpsilonDirection};

use crate::error::{io_err, CliError, Result};
use crate::files;
use crate::report;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Structured,
}

fn render<T: Serialize>(value: &T, text: String, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => text,
        OutputFormat::Structured => {
            let mut json = serde_json::to_string_pretty(value).expect("reports serialize");
            json.push('\n');
            json
        }
    }
}

fn emit(rendered: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, rendered).map_err(io_err(format!("writing {}", path.display())))
        }
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

pub struct CleanArgs {
    pub snapshot: PathBuf,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Rank label issues in one snapshot file. Exit 0 when the file is clean.
pub fn cmd_clean(args: &CleanArgs) -> Result<i32> {
    let snapshot = files::read_snapshot(&args.snapshot)?;
    log::info!(
        "loaded snapshot t={} with {} datapoints, {} classes",
        snapshot.time(),
        snapshot.len(),
        snapshot.classes()
    );
    let clean = report::build_clean_report(&snapshot)?;
    let rendered = render(&clean, report::render_clean_text(&clean), args.format);
    emit(&rendered, args.out.as_deref())?;
    Ok(if clean.issues.is_empty() { 0 } else { 1 })
}

pub struct AuditArgs {
    pub series_dir: PathBuf,
    pub manifest: PathBuf,
    pub annotations: PathBuf,
    pub pi: f64,
    pub direction: EpsilonDirection,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Run the full audit over a snapshot directory. Exit 0 iff fair.
pub fn cmd_audit(args: &AuditArgs) -> Result<i32> {
    let series = files::read_series(&args.series_dir)?;
    log::info!(
        "loaded {} snapshots over frame {:?}",
        series.len(),
        series.frame().timestamps()
    );
    let manifest = files::read_manifest(&args.manifest, series.frame())?;
    let truth = files::read_annotations(&args.annotations)?;
    let config = AuditConfig::new(args.pi, series.frame().clone(), args.direction)?;
    let audit = report::build_audit_report(&series, &manifest, &truth, &config)?;
    let rendered = render(&audit, report::render_audit_text(&audit), args.format);
    emit(&rendered, args.out.as_deref())?;
    log::info!(
        "verdict: complete={} reliable={} fair={}",
        audit.verdict.completeness.complete,
        audit.verdict.reliability.reliable,
        audit.verdict.fair
    );
    Ok(if audit.verdict.fair { 0 } else { 1 })
}

pub struct SimulateArgs {
    pub out_dir: PathBuf,
    pub config: Option<PathBuf>,
    pub preset: Option<String>,
    pub seed: Option<u64>,
}

/// Generate a synthetic series and write it in the audit input formats.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    let mut config = match (&args.config, &args.preset) {
        (Some(path), None) => files::read_drift_config(path)?,
        (None, Some(name)) => DriftConfig::preset(name).ok_or_else(|| CliError::Format {
            file: name.clone(),
            detail: "unknown preset; available: midwest-1950, berlin-1990".into(),
        })?,
        _ => {
            return Err(CliError::Format {
                file: "simulate".into(),
                detail: "exactly one of --config or --preset is required".into(),
            })
        }
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let generated = generate(&config)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(io_err(format!("creating {}", args.out_dir.display())))?;
    for snapshot in generated.series.snapshots() {
        files::write_snapshot(&args.out_dir, snapshot)?;
    }
    files::write_manifest(&args.out_dir.join("manifest.json"), &generated.manifest)?;
    files::write_annotations(&args.out_dir.join("annotations.json"), &generated.truth)?;
    println!(
        "wrote {} snapshots, manifest.json, annotations.json (seed {})",
        generated.series.len(),
        config.seed
    );
    Ok(0)
}
