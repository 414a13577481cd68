//! Confident learning on a single snapshot.
//!
//! Per-class probability thresholds, the confident joint (an unnormalized
//! count estimate of the joint distribution of noisy and true labels), the
//! normalized joint estimate, and label-issue filtering with
//! confidence-ranked output.

use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};
use crate::snapshot::Snapshot;

/// Per-class average self-confidence thresholds.
///
/// `values[j]` is the mean predicted probability of class `j` over the
/// datapoints noisy-labeled `j`, or `None` when no datapoint carries that
/// label. Undefined classes never qualify as confident targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    values: Vec<Option<f64>>,
    support: Vec<usize>,
}

impl Thresholds {
    pub fn classes(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, class: usize) -> Option<f64> {
        self.values[class]
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    /// Number of datapoints noisy-labeled `class`.
    pub fn support(&self, class: usize) -> usize {
        self.support[class]
    }
}

/// Average self-confidence per class over the snapshot's noisy labels.
pub fn compute_thresholds(snapshot: &Snapshot) -> Thresholds {
    let m = snapshot.classes();
    let mut sums = vec![0.0f64; m];
    let mut support = vec![0usize; m];
    for x in 0..snapshot.len() {
        let j = snapshot.noisy_label(x);
        sums[j] += snapshot.prob(x, j);
        support[j] += 1;
    }
    let values = sums
        .iter()
        .zip(&support)
        .map(|(&sum, &count)| (count > 0).then(|| sum / count as f64))
        .collect();
    Thresholds { values, support }
}

/// The confident joint: counts of datapoints noisy-labeled `i` that
/// confidently belong to class `j`, plus the per-datapoint bin assignment.
///
/// Each datapoint lands in at most one bin; datapoints confident in no
/// class stay unassigned and are excluded from the counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidentJoint {
    /// Row-major m x m counts: `counts[noisy * m + estimated_true]`.
    counts: Vec<u64>,
    classes: usize,
    /// Bin `(noisy, estimated_true)` per datapoint, `None` when unassigned.
    assigned: Vec<Option<(usize, usize)>>,
}

impl ConfidentJoint {
    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn count(&self, noisy: usize, estimated_true: usize) -> u64 {
        self.counts[noisy * self.classes + estimated_true]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts
            .chunks(self.classes)
            .map(|c| c.to_vec())
            .collect()
    }

    pub fn row_total(&self, noisy: usize) -> u64 {
        self.counts[noisy * self.classes..(noisy + 1) * self.classes]
            .iter()
            .sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn assigned(&self) -> &[Option<(usize, usize)>] {
        &self.assigned
    }

    /// Bin of datapoint `x`, if it qualified for any class.
    pub fn assignment(&self, x: usize) -> Option<(usize, usize)> {
        self.assigned[x]
    }

    pub fn unassigned_count(&self) -> usize {
        self.assigned.iter().filter(|a| a.is_none()).count()
    }
}

/// Estimated true class for one datapoint: the confident class with the
/// highest predicted probability, or `None` when no class's threshold is
/// met. Ties break toward the lowest class index for reproducibility.
fn confident_class(snapshot: &Snapshot, thresholds: &Thresholds, x: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for j in 0..snapshot.classes() {
        let Some(t) = thresholds.value(j) else {
            continue;
        };
        let p = snapshot.prob(x, j);
        if p >= t && best.is_none_or(|(_, bp)| p > bp) {
            best = Some((j, p));
        }
    }
    best.map(|(j, _)| j)
}

/// Bin every datapoint by noisy label and confident class.
pub fn confident_joint(snapshot: &Snapshot, thresholds: &Thresholds) -> Result<ConfidentJoint> {
    let m = snapshot.classes();
    if thresholds.classes() != m {
        return Err(AuditError::ThresholdMismatch {
            got: thresholds.classes(),
            expected: m,
        });
    }
    let mut counts = vec![0u64; m * m];
    let mut assigned = Vec::with_capacity(snapshot.len());
    for x in 0..snapshot.len() {
        let bin = confident_class(snapshot, thresholds, x).map(|j| {
            let i = snapshot.noisy_label(x);
            counts[i * m + j] += 1;
            (i, j)
        });
        assigned.push(bin);
    }
    Ok(ConfidentJoint {
        counts,
        classes: m,
        assigned,
    })
}

/// Normalized joint estimate of noisy and true labels.
///
/// Entries sum to one; each row's mass is proportional to its class's
/// noisy-label frequency. Rows whose class has noisy support but an empty
/// confident-joint row cannot be normalized and are flagged as degenerate,
/// carrying zero mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointEstimate {
    /// Row-major m x m probabilities.
    entries: Vec<f64>,
    classes: usize,
    degenerate_rows: Vec<usize>,
}

impl JointEstimate {
    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn entry(&self, noisy: usize, estimated_true: usize) -> f64 {
        self.entries[noisy * self.classes + estimated_true]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.classes)
            .map(|c| c.to_vec())
            .collect()
    }

    pub fn row_sum(&self, noisy: usize) -> f64 {
        self.entries[noisy * self.classes..(noisy + 1) * self.classes]
            .iter()
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Classes with noisy support whose confident-joint row was empty.
    pub fn degenerate_rows(&self) -> &[usize] {
        &self.degenerate_rows
    }
}

/// Row-normalize the confident joint, rescale rows to the noisy-label
/// frequencies, and normalize globally to a probability matrix.
pub fn estimate_joint(joint: &ConfidentJoint, snapshot: &Snapshot) -> Result<JointEstimate> {
    let m = snapshot.classes();
    if joint.classes() != m {
        return Err(AuditError::ThresholdMismatch {
            got: joint.classes(),
            expected: m,
        });
    }
    let mut support = vec![0u64; m];
    for x in 0..snapshot.len() {
        support[snapshot.noisy_label(x)] += 1;
    }

    let mut scaled = vec![0.0f64; m * m];
    let mut degenerate_rows = Vec::new();
    let mut denominator = 0.0f64;
    for i in 0..m {
        let row_total = joint.row_total(i);
        if row_total == 0 {
            if support[i] > 0 {
                degenerate_rows.push(i);
            }
            continue;
        }
        for j in 0..m {
            let value = joint.count(i, j) as f64 / row_total as f64 * support[i] as f64;
            scaled[i * m + j] = value;
            denominator += value;
        }
    }
    if denominator == 0.0 {
        return Err(AuditError::EmptyJoint);
    }
    let entries = scaled.iter().map(|v| v / denominator).collect();
    Ok(JointEstimate {
        entries,
        classes: m,
        degenerate_rows,
    })
}

/// A datapoint whose confident class disagrees with its noisy label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelIssue {
    pub id: String,
    /// The noisy label the datapoint carries.
    pub given: usize,
    /// The confidently estimated true label.
    pub suggested: usize,
    /// Predicted probability of the given label.
    pub self_confidence: f64,
}

/// Datapoints binned off-diagonal, least self-confident first.
///
/// Ties in self-confidence order by datapoint id so repeated runs list
/// issues identically.
pub fn find_label_issues(joint: &ConfidentJoint, snapshot: &Snapshot) -> Vec<LabelIssue> {
    let mut issues: Vec<LabelIssue> = joint
        .assigned()
        .iter()
        .enumerate()
        .filter_map(|(x, bin)| match bin {
            Some((given, suggested)) if given != suggested => Some(LabelIssue {
                id: snapshot.id(x).to_string(),
                given: *given,
                suggested: *suggested,
                self_confidence: snapshot.self_confidence(x),
            }),
            _ => None,
        })
        .collect();
    issues.sort_by(|a, b| {
        a.self_confidence
            .total_cmp(&b.self_confidence)
            .then_with(|| a.id.cmp(&b.id))
    });
    issues
}
