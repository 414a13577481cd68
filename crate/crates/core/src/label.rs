//! Class labels, label partitions, and time frames.

use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};

/// A named class with its ordinal position in a partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassLabel {
    name: String,
    index: usize,
}

impl ClassLabel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index(&self) -> usize {
        self.index
    }
}

/// The set of admissible class labels valid at one timestamp.
///
/// Label names are unique and non-empty; indices are the positions in the
/// declared order. Partitions at different times may carry different label
/// sets (ontologies grow).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelPartition {
    labels: Vec<ClassLabel>,
    valid_at: i64,
}

impl LabelPartition {
    /// Build a partition from ordered label names.
    pub fn new<S: Into<String>>(names: Vec<S>, valid_at: i64) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() < 2 {
            return Err(AuditError::InvariantViolation {
                detail: format!("partition needs at least 2 labels, got {}", names.len()),
            });
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(AuditError::InvariantViolation {
                    detail: format!("label {i} has an empty name"),
                });
            }
            if names[..i].contains(name) {
                return Err(AuditError::InvariantViolation {
                    detail: format!("duplicate label name {name:?}"),
                });
            }
        }
        let labels = names
            .into_iter()
            .enumerate()
            .map(|(index, name)| ClassLabel { name, index })
            .collect();
        Ok(Self { labels, valid_at })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn valid_at(&self) -> i64 {
        self.valid_at
    }

    /// Label name for an index, if in range.
    pub fn name_of(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(|l| l.name.as_str())
    }

    /// Index of a label name, if present.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(|l| l.name.as_str())
    }

    /// True when both partitions declare the same label names in the same
    /// order, regardless of when they are valid.
    pub fn same_labels(&self, other: &Self) -> bool {
        self.labels.len() == other.labels.len()
            && self
                .labels
                .iter()
                .zip(&other.labels)
                .all(|(a, b)| a.name == b.name)
    }
}

/// A strictly increasing sequence of integer time indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeFrame {
    timestamps: Vec<i64>,
}

impl TimeFrame {
    pub fn new(timestamps: Vec<i64>) -> Result<Self> {
        if timestamps.is_empty() {
            return Err(AuditError::InvariantViolation {
                detail: "time frame must hold at least one timestamp".into(),
            });
        }
        if timestamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AuditError::InvariantViolation {
                detail: "time frame timestamps must be strictly increasing".into(),
            });
        }
        Ok(Self { timestamps })
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn first(&self) -> i64 {
        self.timestamps[0]
    }

    pub fn last(&self) -> i64 {
        *self.timestamps.last().expect("non-empty by construction")
    }

    pub fn contains(&self, t: i64) -> bool {
        self.timestamps.binary_search(&t).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_assigns_ordinal_indices() {
        let p = LabelPartition::new(vec!["male", "female"], 0).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.name_of(0), Some("male"));
        assert_eq!(p.index_of("female"), Some(1));
        assert_eq!(p.index_of("nonbinary"), None);
    }

    #[test]
    fn partition_rejects_duplicates_and_short_sets() {
        assert!(matches!(
            LabelPartition::new(vec!["a", "a"], 0),
            Err(AuditError::InvariantViolation { .. })
        ));
        assert!(LabelPartition::new(vec!["only"], 0).is_err());
        assert!(LabelPartition::new(vec!["a", ""], 0).is_err());
    }

    #[test]
    fn same_labels_ignores_valid_at() {
        let a = LabelPartition::new(vec!["x", "y"], 0).unwrap();
        let b = LabelPartition::new(vec!["x", "y"], 7).unwrap();
        let c = LabelPartition::new(vec!["y", "x"], 0).unwrap();
        assert!(a.same_labels(&b));
        assert!(!a.same_labels(&c));
    }

    #[test]
    fn frame_must_increase() {
        assert!(TimeFrame::new(vec![]).is_err());
        assert!(TimeFrame::new(vec![1, 1]).is_err());
        assert!(TimeFrame::new(vec![2, 1]).is_err());
        let f = TimeFrame::new(vec![1, 3, 9]).unwrap();
        assert_eq!(f.first(), 1);
        assert_eq!(f.last(), 9);
        assert!(f.contains(3));
        assert!(!f.contains(4));
    }
}
