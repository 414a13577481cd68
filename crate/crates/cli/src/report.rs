//! Report assembly and rendering.
//!
//! Every number in a report comes from a library call on the parsed
//! inputs; this module only arranges results. Reports serialize to JSON
//! (the structured format, which round-trips losslessly) or render as
//! plain text.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tempaudit_core::{
    check_completeness, check_fairness, check_reliability, compute_thresholds, confident_flips,
    confident_joint, estimate_joint, find_label_issues, snapshot_confusion, tag_biases,
    temporal_error_probability, worst_class_change_rate, Annotations, AuditConfig, AuditError,
    AuditVerdict, ChangeRate, EpsilonDirection, LabelSetManifest, Snapshot, SnapshotSeries,
    TemporalErrorProbability, Thresholds,
};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub pi: f64,
    pub direction: EpsilonDirection,
    pub frame: Vec<i64>,
    pub snapshot_count: usize,
    pub class_labels: Vec<String>,
}

/// One label issue with names resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssueSummary {
    pub id: String,
    pub given: String,
    pub suggested: String,
    pub self_confidence: f64,
}

/// Confident-learning results for one snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSummary {
    pub time: i64,
    pub datapoints: usize,
    pub thresholds: Thresholds,
    pub confident_joint: Vec<Vec<u64>>,
    pub unassigned: usize,
    pub joint_estimate: Vec<Vec<f64>>,
    pub degenerate_rows: Vec<usize>,
    pub label_issues: Vec<IssueSummary>,
}

/// Endpoint confusion matrices, their rates, and their difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointComparison {
    pub from_time: i64,
    pub to_time: i64,
    pub from_confusion: Vec<Vec<u64>>,
    pub to_confusion: Vec<Vec<u64>>,
    pub from_accuracy: f64,
    pub to_accuracy: f64,
    pub from_error_rate: f64,
    pub to_error_rate: f64,
    pub difference: Vec<Vec<i64>>,
    /// Datapoints whose truth label is outside the snapshot partition.
    pub excluded_from: Vec<String>,
    pub excluded_to: Vec<String>,
}

/// A drift-adjusted error probability with names resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalErrorEntry {
    pub wrong_label: String,
    pub correct_label: String,
    pub evaluation: TemporalErrorProbability,
}

/// The full audit output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub config: ConfigEcho,
    pub snapshots: Vec<SnapshotSummary>,
    pub endpoints: EndpointComparison,
    /// Informational change rates between consecutive snapshots.
    pub step_change_rates: Vec<ChangeRate>,
    /// The endpoint change rate the reliability verdict uses.
    pub change_rate: ChangeRate,
    pub verdict: AuditVerdict,
    pub temporal_error_probabilities: Vec<TemporalErrorEntry>,
    pub warnings: Vec<String>,
}

const DRIFT_SCALING_NOTE: &str = "note: temporal error probabilities scale the earlier \
noisy-label marginal multiplicatively by (1 - eps) or (1 + eps); an additive adjustment \
can exceed 1 and is not a probability, so it is not offered";

fn issue_summaries(
    snapshot: &Snapshot,
    issues: Vec<tempaudit_core::LabelIssue>,
) -> Vec<IssueSummary> {
    issues
        .into_iter()
        .map(|issue| IssueSummary {
            given: snapshot
                .partition()
                .name_of(issue.given)
                .expect("issue label in range")
                .to_string(),
            suggested: snapshot
                .partition()
                .name_of(issue.suggested)
                .expect("issue label in range")
                .to_string(),
            id: issue.id,
            self_confidence: issue.self_confidence,
        })
        .collect()
}

/// Run confident learning on one snapshot and summarize it. Degenerate
/// joint-estimate rows become warnings.
pub fn summarize_snapshot(
    snapshot: &Snapshot,
    warnings: &mut Vec<String>,
) -> Result<SnapshotSummary> {
    let thresholds = compute_thresholds(snapshot);
    let joint = confident_joint(snapshot, &thresholds)?;
    let estimate = estimate_joint(&joint, snapshot)?;
    for &row in estimate.degenerate_rows() {
        warnings.push(format!(
            "time {}: class {:?} has noisy labels but an empty confident-joint row; \
             it carries no mass in the joint estimate",
            snapshot.time(),
            snapshot.partition().name_of(row).unwrap_or("?"),
        ));
    }
    let label_issues = issue_summaries(snapshot, find_label_issues(&joint, snapshot));
    Ok(SnapshotSummary {
        time: snapshot.time(),
        datapoints: snapshot.len(),
        thresholds,
        confident_joint: joint.rows(),
        unassigned: joint.unassigned_count(),
        joint_estimate: estimate.rows(),
        degenerate_rows: estimate.degenerate_rows().to_vec(),
        label_issues,
    })
}

/// Assemble the full audit report.
pub fn build_audit_report(
    series: &SnapshotSeries,
    manifest: &LabelSetManifest,
    truth: &Annotations,
    config: &AuditConfig,
) -> Result<AuditReport> {
    let mut warnings = Vec::new();

    let snapshots = series
        .snapshots()
        .iter()
        .map(|s| summarize_snapshot(s, &mut warnings))
        .collect::<Result<Vec<_>>>()?;

    let first = series.first();
    let last = series.last();
    let from = snapshot_confusion(first, truth)?;
    let to = snapshot_confusion(last, truth)?;
    for (time, excluded) in [(first.time(), &from.excluded), (last.time(), &to.excluded)] {
        if !excluded.is_empty() {
            warnings.push(format!(
                "time {time}: {} datapoint(s) excluded from the confusion matrix because \
                 their truth label is outside the snapshot's label set: {}",
                excluded.len(),
                excluded.join(", ")
            ));
        }
    }
    let endpoints = EndpointComparison {
        from_time: first.time(),
        to_time: last.time(),
        from_confusion: from.matrix.rows(),
        to_confusion: to.matrix.rows(),
        from_accuracy: from.matrix.accuracy()?,
        to_accuracy: to.matrix.accuracy()?,
        from_error_rate: from.matrix.error_rate()?,
        to_error_rate: to.matrix.error_rate()?,
        difference: to.matrix.diff(&from.matrix)?.rows(),
        excluded_from: from.excluded.clone(),
        excluded_to: to.excluded.clone(),
    };

    let mut step_change_rates = Vec::new();
    for pair in series.snapshots().windows(2) {
        match worst_class_change_rate(&pair[0], &pair[1], truth) {
            Ok(rate) => step_change_rates.push(rate),
            Err(e) => warnings.push(format!(
                "step {} -> {}: change rate unavailable: {e}",
                pair[0].time(),
                pair[1].time()
            )),
        }
    }

    let completeness = check_completeness(manifest, series, truth)?;
    for note in &completeness.cross_time_coverage {
        warnings.push(format!(
            "datapoint {} at time {} is covered only by the other endpoint's \
             partition (label {:?})",
            note.id, note.time, note.label
        ));
    }
    if !completeness.intermediate_only_labels.is_empty() {
        warnings.push(format!(
            "labels declared only at intermediate timestamps are ignored by the \
             endpoint union: {}",
            completeness.intermediate_only_labels.join(", ")
        ));
    }
    let reliability = check_reliability(series, truth, config)?;
    let flips = confident_flips(series)?;
    let tags = tag_biases(&completeness, &flips);
    let verdict = check_fairness(&completeness, &reliability)?.with_bias_tags(tags);
    let change_rate = reliability.epsilon.clone();

    let mut temporal_error_probabilities = Vec::new();
    let partition = first.partition();
    for wrong in 0..partition.len() {
        for correct in 0..partition.len() {
            if wrong == correct {
                continue;
            }
            let evaluation = temporal_error_probability(
                &to.matrix,
                &from.matrix,
                &change_rate,
                wrong,
                correct,
                config.epsilon_direction(),
            );
            match evaluation {
                Ok(evaluation) => {
                    if evaluation.clamped {
                        warnings.push(format!(
                            "temporal error probability for ({}, {}) exceeded 1 ({:.6}) and was clamped",
                            partition.name_of(wrong).unwrap_or("?"),
                            partition.name_of(correct).unwrap_or("?"),
                            evaluation.raw,
                        ));
                    }
                    temporal_error_probabilities.push(TemporalErrorEntry {
                        wrong_label: partition.name_of(wrong).unwrap_or("?").to_string(),
                        correct_label: partition.name_of(correct).unwrap_or("?").to_string(),
                        evaluation,
                    });
                }
                Err(AuditError::ZeroMarginal { class, side }) => warnings.push(format!(
                    "temporal error probability for ({}, {}) skipped: zero marginal for \
                     class {:?} ({side})",
                    partition.name_of(wrong).unwrap_or("?"),
                    partition.name_of(correct).unwrap_or("?"),
                    partition.name_of(class).unwrap_or("?"),
                )),
                Err(other) => return Err(other.into()),
            }
        }
    }
    if !temporal_error_probabilities.is_empty() {
        warnings.push(DRIFT_SCALING_NOTE.to_string());
    }

    Ok(AuditReport {
        config: ConfigEcho {
            pi: config.pi(),
            direction: config.epsilon_direction(),
            frame: series.frame().timestamps().to_vec(),
            snapshot_count: series.len(),
            class_labels: partition.names().map(String::from).collect(),
        },
        snapshots,
        endpoints,
        step_change_rates,
        change_rate,
        verdict,
        temporal_error_probabilities,
        warnings,
    })
}

/// Output of the `clean` command: ranked label issues for one snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanReport {
    pub time: i64,
    pub datapoints: usize,
    pub class_labels: Vec<String>,
    pub thresholds: Thresholds,
    pub confident_joint: Vec<Vec<u64>>,
    pub unassigned: usize,
    pub issues: Vec<IssueSummary>,
    pub warnings: Vec<String>,
}

pub fn build_clean_report(snapshot: &Snapshot) -> Result<CleanReport> {
    let mut warnings = Vec::new();
    let summary = summarize_snapshot(snapshot, &mut warnings)?;
    Ok(CleanReport {
        time: summary.time,
        datapoints: summary.datapoints,
        class_labels: snapshot.partition().names().map(String::from).collect(),
        thresholds: summary.thresholds,
        confident_joint: summary.confident_joint,
        unassigned: summary.unassigned,
        issues: summary.label_issues,
        warnings,
    })
}

fn write_grid<T: std::fmt::Display>(out: &mut String, labels: &[String], rows: &[Vec<T>]) {
    for (label, row) in labels.iter().zip(rows) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(out, "    {label:>12}  [{}]", cells.join(", "));
    }
}

fn write_issues(out: &mut String, issues: &[IssueSummary]) {
    if issues.is_empty() {
        let _ = writeln!(out, "  no label issues found");
        return;
    }
    let _ = writeln!(
        out,
        "  {} label issue(s), least confident first:",
        issues.len()
    );
    let shown = issues.len().min(20);
    for issue in &issues[..shown] {
        let _ = writeln!(
            out,
            "    {}  {} -> {}  self-confidence {:.6}",
            issue.id, issue.given, issue.suggested, issue.self_confidence
        );
    }
    if issues.len() > shown {
        let _ = writeln!(out, "    ... and {} more", issues.len() - shown);
    }
}

fn thresholds_line(labels: &[String], thresholds: &Thresholds) -> String {
    labels
        .iter()
        .enumerate()
        .map(|(j, name)| match thresholds.value(j) {
            Some(t) => format!("{name}={t:.6}"),
            None => format!("{name}=undefined"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn format_rate(rate: &ChangeRate, labels: &[String]) -> String {
    let basis = match rate.basis() {
        tempaudit_core::AccuracyBasis::Overall => "overall accuracy".to_string(),
        tempaudit_core::AccuracyBasis::ClassConditional { class } => {
            format!(
                "accuracy of class {:?}",
                labels.get(class).map(String::as_str).unwrap_or("?")
            )
        }
    };
    format!(
        "epsilon={:.6} over {} -> {} ({basis}: {:.6} -> {:.6})",
        rate.epsilon(),
        rate.from_time(),
        rate.to_time(),
        rate.from_accuracy(),
        rate.to_accuracy()
    )
}

fn write_snapshot_section(out: &mut String, labels: &[String], summary: &SnapshotSummary) {
    let _ = writeln!(
        out,
        "[snapshot t={}] {} datapoint(s), {} unassigned",
        summary.time, summary.datapoints, summary.unassigned
    );
    let _ = writeln!(
        out,
        "  thresholds: {}",
        thresholds_line(labels, &summary.thresholds)
    );
    let _ = writeln!(
        out,
        "  confident joint (rows noisy, columns estimated true):"
    );
    write_grid(out, labels, &summary.confident_joint);
    let _ = writeln!(out, "  joint estimate:");
    let rounded: Vec<Vec<String>> = summary
        .joint_estimate
        .iter()
        .map(|row| row.iter().map(|v| format!("{v:.6}")).collect())
        .collect();
    write_grid(out, labels, &rounded);
    write_issues(out, &summary.label_issues);
}

/// Plain-text rendering of the audit report.
pub fn render_audit_text(report: &AuditReport) -> String {
    let labels = &report.config.class_labels;
    let mut out = String::new();
    let _ = writeln!(out, "tempaudit audit report");
    let _ = writeln!(
        out,
        "config: pi={} direction={} frame={:?} snapshots={} classes={}",
        report.config.pi,
        report.config.direction,
        report.config.frame,
        report.config.snapshot_count,
        labels.join(",")
    );
    out.push('\n');
    for summary in &report.snapshots {
        write_snapshot_section(&mut out, labels, summary);
        out.push('\n');
    }

    let e = &report.endpoints;
    let _ = writeln!(out, "[endpoints t={} vs t={}]", e.from_time, e.to_time);
    let _ = writeln!(
        out,
        "  confusion at t={} (rows predicted, columns actual):",
        e.from_time
    );
    write_grid(&mut out, labels, &e.from_confusion);
    let _ = writeln!(
        out,
        "  accuracy {:.6}, error rate {:.6}",
        e.from_accuracy, e.from_error_rate
    );
    let _ = writeln!(out, "  confusion at t={}:", e.to_time);
    write_grid(&mut out, labels, &e.to_confusion);
    let _ = writeln!(
        out,
        "  accuracy {:.6}, error rate {:.6}",
        e.to_accuracy, e.to_error_rate
    );
    let _ = writeln!(out, "  difference (later - earlier):");
    write_grid(&mut out, labels, &e.difference);
    out.push('\n');

    let _ = writeln!(out, "[change rate]");
    for rate in &report.step_change_rates {
        let _ = writeln!(out, "  step: {}", format_rate(rate, labels));
    }
    let _ = writeln!(out, "  frame: {}", format_rate(&report.change_rate, labels));
    out.push('\n');

    let v = &report.verdict;
    let _ = writeln!(
        out,
        "[completeness] complete={} uncovered={}",
        v.completeness.complete,
        v.completeness.uncovered.len()
    );
    for u in &v.completeness.uncovered {
        let _ = writeln!(
            out,
            "  datapoint {} at t={} needs label {:?}",
            u.id, u.time, u.needed_label
        );
    }
    let _ = writeln!(
        out,
        "[reliability] reliable={} epsilon={:.6} pi={}",
        v.reliability.reliable,
        v.reliability.epsilon.epsilon(),
        v.reliability.pi
    );
    let _ = writeln!(out, "[verdict] fair={}", v.fair);
    if v.bias_tags.is_empty() {
        let _ = writeln!(out, "[bias tags] none");
    } else {
        let _ = writeln!(out, "[bias tags]");
        for tag in &v.bias_tags {
            let _ = writeln!(out, "  {}:", tag.kind);
            let shown = tag.evidence.len().min(10);
            for evidence in &tag.evidence[..shown] {
                let _ = writeln!(out, "    - {evidence}");
            }
            if tag.evidence.len() > shown {
                let _ = writeln!(out, "    ... and {} more", tag.evidence.len() - shown);
            }
        }
    }
    out.push('\n');

    let _ = writeln!(
        out,
        "[temporal error probabilities] direction={}",
        report.config.direction
    );
    for entry in &report.temporal_error_probabilities {
        let _ = writeln!(
            out,
            "  p(wrong={} at t={} | correct={} at t={}) = {:.6}{}",
            entry.wrong_label,
            e.to_time,
            entry.correct_label,
            e.from_time,
            entry.evaluation.value,
            if entry.evaluation.clamped {
                " (clamped)"
            } else {
                ""
            }
        );
    }
    out.push('\n');

    if report.warnings.is_empty() {
        let _ = writeln!(out, "[warnings] none");
    } else {
        let _ = writeln!(out, "[warnings]");
        for warning in &report.warnings {
            let _ = writeln!(out, "  - {warning}");
        }
    }
    out
}

/// Plain-text rendering of the clean report.
pub fn render_clean_text(report: &CleanReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "label issues for snapshot t={} ({} datapoint(s), classes={})",
        report.time,
        report.datapoints,
        report.class_labels.join(",")
    );
    let _ = writeln!(
        out,
        "thresholds: {}",
        thresholds_line(&report.class_labels, &report.thresholds)
    );
    let _ = writeln!(out, "unassigned: {}", report.unassigned);
    write_issues(&mut out, &report.issues);
    for warning in &report.warnings {
        let _ = writeln!(out, "warning: {warning}");
    }
    out
}
