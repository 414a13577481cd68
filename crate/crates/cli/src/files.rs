//! On-disk formats.
//!
//! Snapshots are delimited text with a header row and columns
//! `id,noisy_label,p_<class0>,...,p_<classM-1>`, one file per timestamp
//! named `snapshot_<t>.csv`. Manifests map timestamps to label-name lists;
//! annotations map (id, timestamp) to the correct label name; both are
//! JSON documents. The drift-generator config is a JSON mirror of
//! [`DriftConfig`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tempaudit_core::{
    Annotations, DriftConfig, LabelPartition, LabelSetManifest, Snapshot, SnapshotSeries, TimeFrame,
};

use crate::error::{io_err, CliError, Result};

const PROB_PREFIX: &str = "p_";

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Timestamp encoded in a snapshot file name (`snapshot_<t>`, any
/// extension).
pub fn snapshot_time_from_name(path: &Path) -> Result<i64> {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let time = stem.strip_prefix("snapshot_").and_then(|t| t.parse().ok());
    time.ok_or_else(|| CliError::Format {
        file: file_name(path),
        detail: "snapshot files must be named snapshot_<t>".into(),
    })
}

/// Parse one snapshot file. The header row names the classes; the file
/// name carries the timestamp.
pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let time = snapshot_time_from_name(path)?;
    let file = file_name(path);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Format {
            file: file.clone(),
            detail: e.to_string(),
        })?;

    let headers = reader
        .headers()
        .map_err(|e| CliError::Format {
            file: file.clone(),
            detail: format!("unreadable header: {e}"),
        })?
        .clone();
    if headers.len() < 4 || headers.get(0) != Some("id") || headers.get(1) != Some("noisy_label") {
        return Err(CliError::Format {
            file,
            detail: format!(
                "header must be id,noisy_label,{PROB_PREFIX}<class>,... with at least two classes; got {:?}",
                headers.iter().collect::<Vec<_>>()
            ),
        });
    }
    let mut class_names = Vec::with_capacity(headers.len() - 2);
    for column in headers.iter().skip(2) {
        match column.strip_prefix(PROB_PREFIX) {
            Some(name) if !name.is_empty() => class_names.push(name.to_string()),
            _ => {
                return Err(CliError::Format {
                    file,
                    detail: format!(
                        "probability column {column:?} must be named {PROB_PREFIX}<class>"
                    ),
                })
            }
        }
    }
    let partition = LabelPartition::new(class_names, time)?;

    let mut ids = Vec::new();
    let mut noisy = Vec::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CliError::Parse {
                file: file.clone(),
                line,
                detail: e.to_string(),
            }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let parse_err = |detail: String| CliError::Parse {
            file: file.clone(),
            line,
            detail,
        };
        if record.len() != partition.len() + 2 {
            return Err(parse_err(format!(
                "expected {} fields, got {}",
                partition.len() + 2,
                record.len()
            )));
        }
        ids.push(record[0].to_string());
        let label = &record[1];
        noisy.push(
            partition
                .index_of(label)
                .ok_or_else(|| parse_err(format!("unknown noisy label {label:?}")))?,
        );
        let mut row = Vec::with_capacity(partition.len());
        for value in record.iter().skip(2) {
            row.push(
                value
                    .parse::<f64>()
                    .map_err(|e| parse_err(format!("bad probability {value:?}: {e}")))?,
            );
        }
        rows.push(row);
    }
    Ok(Snapshot::new(time, partition, ids, noisy, rows, None)?)
}

/// Write `snapshot_<t>.csv` into `dir` and return its path.
pub fn write_snapshot(dir: &Path, snapshot: &Snapshot) -> Result<PathBuf> {
    let mut out = String::from("id,noisy_label");
    for name in snapshot.partition().names() {
        write!(out, ",{PROB_PREFIX}{name}").expect("string write");
    }
    out.push('\n');
    for x in 0..snapshot.len() {
        write!(
            out,
            "{},{}",
            snapshot.id(x),
            snapshot
                .partition()
                .name_of(snapshot.noisy_label(x))
                .expect("noisy label in range")
        )
        .expect("string write");
        for &p in snapshot.prob_row(x) {
            write!(out, ",{p}").expect("string write");
        }
        out.push('\n');
    }
    let path = dir.join(format!("snapshot_{}.csv", snapshot.time()));
    fs::write(&path, out).map_err(io_err(format!("writing {}", path.display())))?;
    Ok(path)
}

/// Load every `snapshot_*` file in a directory into a time-ordered series.
pub fn read_series(dir: &Path) -> Result<SnapshotSeries> {
    let entries = fs::read_dir(dir).map_err(io_err(format!("reading {}", dir.display())))?;
    let mut snapshots = Vec::new();
    for entry in entries {
        let entry = entry.map_err(io_err(format!("reading {}", dir.display())))?;
        let path = entry.path();
        let is_snapshot = path
            .file_name()
            .map(|n| n.to_string_lossy().starts_with("snapshot_"))
            .unwrap_or(false);
        if is_snapshot {
            snapshots.push(read_snapshot(&path)?);
        }
    }
    if snapshots.is_empty() {
        return Err(CliError::Format {
            file: dir.display().to_string(),
            detail: "no snapshot_<t> files found".into(),
        });
    }
    snapshots.sort_by_key(Snapshot::time);
    let frame = TimeFrame::new(snapshots.iter().map(Snapshot::time).collect())?;
    Ok(SnapshotSeries::new(frame, snapshots)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestFile {
    partitions: BTreeMap<i64, Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AnnotationsFile {
    entries: Vec<AnnotationEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AnnotationEntry {
    id: String,
    time: i64,
    label: String,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(format!("reading {}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        file: file_name(path),
        line: e.line() as u64,
        detail: format!("column {}: {e}", e.column()),
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    fs::write(path, text).map_err(io_err(format!("writing {}", path.display())))
}

/// Parse a manifest and bind it to the audit frame.
pub fn read_manifest(path: &Path, frame: &TimeFrame) -> Result<LabelSetManifest> {
    let parsed: ManifestFile = read_json(path)?;
    let mut partitions = BTreeMap::new();
    for (time, names) in parsed.partitions {
        partitions.insert(time, LabelPartition::new(names, time)?);
    }
    Ok(LabelSetManifest::new(partitions, frame)?)
}

pub fn write_manifest(path: &Path, manifest: &LabelSetManifest) -> Result<()> {
    let partitions = manifest
        .partitions()
        .iter()
        .map(|(t, p)| (*t, p.names().map(String::from).collect()))
        .collect();
    write_json(path, &ManifestFile { partitions })
}

pub fn read_annotations(path: &Path) -> Result<Annotations> {
    let parsed: AnnotationsFile = read_json(path)?;
    let mut annotations = Annotations::new();
    for entry in parsed.entries {
        annotations.insert(entry.id, entry.time, entry.label);
    }
    Ok(annotations)
}

pub fn write_annotations(path: &Path, annotations: &Annotations) -> Result<()> {
    let entries = annotations
        .iter()
        .map(|(time, id, label)| AnnotationEntry {
            id: id.to_string(),
            time,
            label: label.to_string(),
        })
        .collect();
    write_json(path, &AnnotationsFile { entries })
}

pub fn read_drift_config(path: &Path) -> Result<DriftConfig> {
    read_json(path)
}
