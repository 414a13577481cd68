//! Timestamped dataset snapshots and ground-truth annotations.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};
use crate::label::LabelPartition;

/// Tolerance for predicted-probability rows summing to one.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// One timestamped view of a dataset: datapoint ids, noisy labels, and the
/// out-of-sample predicted-probability matrix. Ground-truth labels are
/// carried only when the data is simulated or annotated.
///
/// Immutable after construction; every accessor is read-only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    time: i64,
    partition: LabelPartition,
    ids: Vec<String>,
    noisy_labels: Vec<usize>,
    /// Row-major n x m matrix; row x holds p(label = j | x) for each class j.
    probs: Vec<f64>,
    true_labels: Option<Vec<usize>>,
}

impl Snapshot {
    /// Validate and build a snapshot. `prob_rows` is one probability row per
    /// datapoint, each covering every class in `partition` order.
    pub fn new(
        time: i64,
        partition: LabelPartition,
        ids: Vec<String>,
        noisy_labels: Vec<usize>,
        prob_rows: Vec<Vec<f64>>,
        true_labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = ids.len();
        let m = partition.len();
        if n == 0 {
            return Err(AuditError::InvariantViolation {
                detail: "snapshot must hold at least one datapoint".into(),
            });
        }
        if noisy_labels.len() != n || prob_rows.len() != n {
            return Err(AuditError::InvariantViolation {
                detail: format!(
                    "snapshot fields disagree on datapoint count: {} ids, {} noisy labels, {} probability rows",
                    n,
                    noisy_labels.len(),
                    prob_rows.len()
                ),
            });
        }
        let mut seen = HashSet::with_capacity(n);
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(AuditError::InvariantViolation {
                    detail: format!("duplicate datapoint id {id:?}"),
                });
            }
        }
        for (x, &label) in noisy_labels.iter().enumerate() {
            if label >= m {
                return Err(AuditError::InvariantViolation {
                    detail: format!(
                        "noisy label {label} of datapoint {:?} (row {x}) exceeds {m} classes",
                        ids[x]
                    ),
                });
            }
        }
        if let Some(truth) = &true_labels {
            if truth.len() != n {
                return Err(AuditError::InvariantViolation {
                    detail: format!("{} true labels for {} datapoints", truth.len(), n),
                });
            }
            if let Some(&bad) = truth.iter().find(|&&l| l >= m) {
                return Err(AuditError::InvariantViolation {
                    detail: format!("true label {bad} exceeds {m} classes"),
                });
            }
        }
        let mut probs = Vec::with_capacity(n * m);
        for (x, row) in prob_rows.iter().enumerate() {
            if row.len() != m {
                return Err(AuditError::InvariantViolation {
                    detail: format!(
                        "probability row {x} has {} entries, partition has {m} classes",
                        row.len()
                    ),
                });
            }
            let mut sum = 0.0;
            for (j, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(AuditError::InvariantViolation {
                        detail: format!("probability [{x}][{j}] = {p} outside [0, 1]"),
                    });
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(AuditError::InvariantViolation {
                    detail: format!("probability row {x} sums to {sum}, expected 1 within {ROW_SUM_TOLERANCE:e}"),
                });
            }
            probs.extend_from_slice(row);
        }
        Ok(Self {
            time,
            partition,
            ids,
            noisy_labels,
            probs,
            true_labels,
        })
    }

    pub fn time(&self) -> i64 {
        self.time
    }

    pub fn partition(&self) -> &LabelPartition {
        &self.partition
    }

    /// Number of datapoints.
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Number of classes.
    pub fn classes(&self) -> usize {
        self.partition.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn noisy_labels(&self) -> &[usize] {
        &self.noisy_labels
    }

    pub fn noisy_label(&self, x: usize) -> usize {
        self.noisy_labels[x]
    }

    /// Predicted probability that datapoint `x` belongs to class `j`.
    pub fn prob(&self, x: usize, j: usize) -> f64 {
        self.probs[x * self.classes() + j]
    }

    /// Full probability row for datapoint `x`.
    pub fn prob_row(&self, x: usize) -> &[f64] {
        let m = self.classes();
        &self.probs[x * m..(x + 1) * m]
    }

    /// Predicted probability of the datapoint's own noisy label.
    pub fn self_confidence(&self, x: usize) -> f64 {
        self.prob(x, self.noisy_labels[x])
    }

    pub fn true_labels(&self) -> Option<&[usize]> {
        self.true_labels.as_deref()
    }
}

/// Ground-truth labels over time: `(id, time) -> correct label name`.
///
/// Names, not indices, so annotations can reference labels that no snapshot
/// partition knows about (the incomplete-label-set case).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotations {
    entries: BTreeMap<(i64, String), String>,
}

impl Annotations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, time: i64, label: impl Into<String>) {
        self.entries.insert((time, id.into()), label.into());
    }

    /// Correct label name for a datapoint at a time, if annotated.
    pub fn get(&self, id: &str, time: i64) -> Option<&str> {
        self.entries
            .get(&(time, id.to_string()))
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in (time, id) order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &str, &str)> {
        self.entries
            .iter()
            .map(|((t, id), label)| (*t, id.as_str(), label.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn partition() -> LabelPartition {
        LabelPartition::new(vec!["male", "female"], 0).unwrap()
    }

    fn valid_rows() -> Vec<Vec<f64>> {
        vec![vec![0.9, 0.1], vec![0.2, 0.8]]
    }

    fn ids(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn accepts_valid_snapshot() {
        let s = Snapshot::new(
            3,
            partition(),
            ids(&["a", "b"]),
            vec![0, 1],
            valid_rows(),
            Some(vec![0, 0]),
        )
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.classes(), 2);
        assert_eq!(s.prob(1, 1), 0.8);
        assert_eq!(s.self_confidence(0), 0.9);
        assert_eq!(s.true_labels(), Some(&[0, 0][..]));
    }

    #[test]
    fn rejects_duplicate_ids() {
        let err = Snapshot::new(
            0,
            partition(),
            ids(&["a", "a"]),
            vec![0, 1],
            valid_rows(),
            None,
        )
        .unwrap_err();
        assert!(
            matches!(err, AuditError::InvariantViolation { detail } if detail.contains("duplicate"))
        );
    }

    #[test]
    fn rejects_bad_row_sum() {
        let err = Snapshot::new(
            0,
            partition(),
            ids(&["a", "b"]),
            vec![0, 1],
            vec![vec![0.9, 0.1], vec![0.2, 0.7]],
            None,
        )
        .unwrap_err();
        assert!(
            matches!(err, AuditError::InvariantViolation { detail } if detail.contains("sums to"))
        );
    }

    #[test]
    fn rejects_probability_outside_unit_interval() {
        let err = Snapshot::new(
            0,
            partition(),
            ids(&["a"]),
            vec![0],
            vec![vec![1.2, -0.2]],
            None,
        )
        .unwrap_err();
        assert!(
            matches!(err, AuditError::InvariantViolation { detail } if detail.contains("outside"))
        );
    }

    #[test]
    fn rejects_noisy_label_out_of_range() {
        let err = Snapshot::new(
            0,
            partition(),
            ids(&["a"]),
            vec![2],
            vec![vec![0.5, 0.5]],
            None,
        )
        .unwrap_err();
        assert!(
            matches!(err, AuditError::InvariantViolation { detail } if detail.contains("exceeds"))
        );
    }

    #[test]
    fn rejects_length_disagreement() {
        assert!(Snapshot::new(
            0,
            partition(),
            ids(&["a", "b"]),
            vec![0],
            valid_rows(),
            None
        )
        .is_err());
        assert!(Snapshot::new(0, partition(), vec![], vec![], vec![], None).is_err());
    }

    #[test]
    fn annotations_lookup() {
        let mut ann = Annotations::new();
        ann.insert("a", 0, "male");
        ann.insert("a", 1, "female");
        assert_eq!(ann.get("a", 0), Some("male"));
        assert_eq!(ann.get("a", 1), Some("female"));
        assert_eq!(ann.get("b", 0), None);
        assert_eq!(ann.len(), 2);
    }
}
