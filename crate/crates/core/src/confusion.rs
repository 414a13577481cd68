//! Confusion matrices and the scalar rates derived from them.
//!
//! Rows index the predicted (noisy) label, columns the actual label. Counts
//! are exact integers; rates are computed in double precision.

use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};
use crate::label::LabelPartition;

/// m x m count matrix of predicted vs. actual labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// Row-major storage: `counts[predicted * m + actual]`.
    counts: Vec<u64>,
    class_order: LabelPartition,
}

impl ConfusionMatrix {
    /// Count (predicted, actual) pairs into a matrix over `partition`.
    pub fn from_labels(
        predicted: &[usize],
        actual: &[usize],
        partition: &LabelPartition,
    ) -> Result<Self> {
        if predicted.len() != actual.len() {
            return Err(AuditError::LengthMismatch {
                predicted: predicted.len(),
                actual: actual.len(),
            });
        }
        if predicted.is_empty() {
            return Err(AuditError::EmptyMatrix);
        }
        let m = partition.len();
        let mut counts = vec![0u64; m * m];
        for (&p, &a) in predicted.iter().zip(actual) {
            if p >= m {
                return Err(AuditError::IndexOutOfRange {
                    index: p,
                    classes: m,
                });
            }
            if a >= m {
                return Err(AuditError::IndexOutOfRange {
                    index: a,
                    classes: m,
                });
            }
            counts[p * m + a] += 1;
        }
        Ok(Self {
            counts,
            class_order: partition.clone(),
        })
    }

    /// Build directly from a count grid (row = predicted, column = actual).
    pub fn from_counts(rows: Vec<Vec<u64>>, partition: &LabelPartition) -> Result<Self> {
        let m = partition.len();
        if rows.len() != m || rows.iter().any(|r| r.len() != m) {
            return Err(AuditError::ShapeMismatch {
                detail: format!("count grid does not match {m} classes"),
            });
        }
        Ok(Self {
            counts: rows.into_iter().flatten().collect(),
            class_order: partition.clone(),
        })
    }

    pub fn classes(&self) -> usize {
        self.class_order.len()
    }

    pub fn class_order(&self) -> &LabelPartition {
        &self.class_order
    }

    pub fn count(&self, predicted: usize, actual: usize) -> u64 {
        self.counts[predicted * self.classes() + actual]
    }

    /// Counts as a nested grid, row = predicted.
    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts
            .chunks(self.classes())
            .map(|c| c.to_vec())
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of datapoints predicted as `class`.
    pub fn predicted_total(&self, class: usize) -> u64 {
        let m = self.classes();
        self.counts[class * m..(class + 1) * m].iter().sum()
    }

    /// Number of datapoints whose actual label is `class`.
    pub fn actual_total(&self, class: usize) -> u64 {
        let m = self.classes();
        (0..m).map(|p| self.counts[p * m + class]).sum()
    }

    /// Diagonal rate: correctly predicted datapoints over all datapoints.
    pub fn accuracy(&self) -> Result<f64> {
        let total = self.total();
        if total == 0 {
            return Err(AuditError::EmptyMatrix);
        }
        let correct: u64 = (0..self.classes()).map(|c| self.count(c, c)).sum();
        Ok(correct as f64 / total as f64)
    }

    /// Complement of [`accuracy`](Self::accuracy); equals the off-diagonal
    /// share of the total.
    pub fn error_rate(&self) -> Result<f64> {
        Ok(1.0 - self.accuracy()?)
    }

    /// p(predicted = `wrong` | actual = `correct`), the per-pair error rate.
    pub fn pair_error_rate(&self, wrong: usize, correct: usize) -> Result<f64> {
        let m = self.classes();
        if wrong >= m {
            return Err(AuditError::IndexOutOfRange {
                index: wrong,
                classes: m,
            });
        }
        if correct >= m {
            return Err(AuditError::IndexOutOfRange {
                index: correct,
                classes: m,
            });
        }
        if wrong == correct {
            return Err(AuditError::SameLabel { label: wrong });
        }
        let marginal = self.actual_total(correct);
        if marginal == 0 {
            return Err(AuditError::ZeroMarginal {
                class: correct,
                side: "actual",
            });
        }
        Ok(self.count(wrong, correct) as f64 / marginal as f64)
    }

    /// Class-conditional accuracy: correct predictions among datapoints whose
    /// actual label is `class` (the standard per-class true positive rate).
    pub fn class_tpr(&self, class: usize) -> Result<f64> {
        let m = self.classes();
        if class >= m {
            return Err(AuditError::IndexOutOfRange {
                index: class,
                classes: m,
            });
        }
        let marginal = self.actual_total(class);
        if marginal == 0 {
            return Err(AuditError::ZeroMarginal {
                class,
                side: "actual",
            });
        }
        Ok(self.count(class, class) as f64 / marginal as f64)
    }

    /// Per-class false positive rate: datapoints wrongly predicted as
    /// `class` among all datapoints whose actual label differs.
    pub fn class_fpr(&self, class: usize) -> Result<f64> {
        let m = self.classes();
        if class >= m {
            return Err(AuditError::IndexOutOfRange {
                index: class,
                classes: m,
            });
        }
        let negatives = self.total() - self.actual_total(class);
        if negatives == 0 {
            return Err(AuditError::ZeroMarginal {
                class,
                side: "actual-complement",
            });
        }
        let false_positives = self.predicted_total(class) - self.count(class, class);
        Ok(false_positives as f64 / negatives as f64)
    }

    /// Elementwise difference `self - earlier`; entries may be negative.
    pub fn diff(&self, earlier: &Self) -> Result<ConfusionDelta> {
        if !self.class_order.same_labels(&earlier.class_order) {
            return Err(AuditError::ShapeMismatch {
                detail: "confusion matrices cover different label partitions".into(),
            });
        }
        let entries = self
            .counts
            .iter()
            .zip(&earlier.counts)
            .map(|(&a, &b)| a as i64 - b as i64)
            .collect();
        Ok(ConfusionDelta {
            entries,
            class_order: self.class_order.clone(),
        })
    }
}

/// Signed elementwise difference of two confusion matrices over the same
/// partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionDelta {
    /// Row-major storage, same layout as [`ConfusionMatrix`].
    entries: Vec<i64>,
    class_order: LabelPartition,
}

impl ConfusionDelta {
    pub fn classes(&self) -> usize {
        self.class_order.len()
    }

    pub fn entry(&self, predicted: usize, actual: usize) -> i64 {
        self.entries[predicted * self.classes() + actual]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries
            .chunks(self.classes())
            .map(|c| c.to_vec())
            .collect()
    }

    /// Sum of all entries; equals the difference of the two totals.
    pub fn total_delta(&self) -> i64 {
        self.entries.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const M: usize = 0;
    const F: usize = 1;

    fn partition() -> LabelPartition {
        LabelPartition::new(vec!["male", "female"], 0).unwrap()
    }

    fn toy_earlier() -> ConfusionMatrix {
        ConfusionMatrix::from_counts(vec![vec![4, 2], vec![1, 3]], &partition()).unwrap()
    }

    fn toy_later() -> ConfusionMatrix {
        ConfusionMatrix::from_counts(vec![vec![2, 3], vec![3, 2]], &partition()).unwrap()
    }

    #[test]
    fn builds_toy_matrix_from_labels() {
        let predicted = [M, M, M, M, F, M, M, F, F, F];
        let actual = [M, M, M, M, M, F, F, F, F, F];
        let cm = ConfusionMatrix::from_labels(&predicted, &actual, &partition()).unwrap();
        assert_eq!(cm.rows(), vec![vec![4, 2], vec![1, 3]]);
        assert_eq!(cm.total(), 10);
    }

    #[test]
    fn builds_identity_case() {
        let cm = ConfusionMatrix::from_labels(&[M, F], &[M, F], &partition()).unwrap();
        assert_eq!(cm.rows(), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn builds_hand_enumerated_case() {
        // pairs: (M,F), (F,M), (M,M)
        let cm = ConfusionMatrix::from_labels(&[M, F, M], &[F, M, M], &partition()).unwrap();
        assert_eq!(cm.rows(), vec![vec![1, 1], vec![1, 0]]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = partition();
        assert_eq!(
            ConfusionMatrix::from_labels(&[0, 1], &[0], &p).unwrap_err(),
            AuditError::LengthMismatch {
                predicted: 2,
                actual: 1
            }
        );
        assert_eq!(
            ConfusionMatrix::from_labels(&[2], &[0], &p).unwrap_err(),
            AuditError::IndexOutOfRange {
                index: 2,
                classes: 2
            }
        );
        assert_eq!(
            ConfusionMatrix::from_labels(&[], &[], &p).unwrap_err(),
            AuditError::EmptyMatrix
        );
    }

    #[test]
    fn accuracy_matches_toy_values() {
        assert!((toy_earlier().accuracy().unwrap() - 0.7).abs() < 1e-12);
        assert!((toy_later().accuracy().unwrap() - 0.4).abs() < 1e-12);
        let identity =
            ConfusionMatrix::from_counts(vec![vec![3, 0], vec![0, 5]], &partition()).unwrap();
        assert_eq!(identity.accuracy().unwrap(), 1.0);
    }

    #[test]
    fn error_rate_complements_accuracy() {
        assert!((toy_earlier().error_rate().unwrap() - 0.3).abs() < 1e-12);
        assert!((toy_later().error_rate().unwrap() - 0.6).abs() < 1e-12);
        let identity =
            ConfusionMatrix::from_counts(vec![vec![1, 0], vec![0, 1]], &partition()).unwrap();
        assert_eq!(identity.error_rate().unwrap(), 0.0);
    }

    #[test]
    fn empty_matrix_has_no_rates() {
        let cm = ConfusionMatrix::from_counts(vec![vec![0, 0], vec![0, 0]], &partition()).unwrap();
        assert_eq!(cm.accuracy().unwrap_err(), AuditError::EmptyMatrix);
        assert_eq!(cm.error_rate().unwrap_err(), AuditError::EmptyMatrix);
    }

    #[test]
    fn pair_error_rate_matches_toy_values() {
        // female predicted for an actually male datapoint
        assert!((toy_earlier().pair_error_rate(F, M).unwrap() - 0.2).abs() < 1e-12);
        assert!((toy_later().pair_error_rate(F, M).unwrap() - 0.6).abs() < 1e-12);
        let identity =
            ConfusionMatrix::from_counts(vec![vec![1, 0], vec![0, 1]], &partition()).unwrap();
        assert_eq!(identity.pair_error_rate(F, M).unwrap(), 0.0);
        assert_eq!(identity.pair_error_rate(M, F).unwrap(), 0.0);
    }

    #[test]
    fn pair_error_rate_rejects_degenerate_requests() {
        assert_eq!(
            toy_earlier().pair_error_rate(M, M).unwrap_err(),
            AuditError::SameLabel { label: M }
        );
        let empty_col =
            ConfusionMatrix::from_counts(vec![vec![2, 0], vec![1, 0]], &partition()).unwrap();
        assert!(matches!(
            empty_col.pair_error_rate(M, F).unwrap_err(),
            AuditError::ZeroMarginal { class: F, .. }
        ));
    }

    #[test]
    fn class_conditional_rates_match_toy_values() {
        // male accuracy 4/5 then 2/5: the accuracy pair behind the change rate
        assert!((toy_earlier().class_tpr(M).unwrap() - 0.8).abs() < 1e-12);
        assert!((toy_later().class_tpr(M).unwrap() - 0.4).abs() < 1e-12);
        assert!((toy_earlier().class_tpr(F).unwrap() - 0.6).abs() < 1e-12);
        // predicted male among actually female: 2/5
        assert!((toy_earlier().class_fpr(M).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn diff_matches_toy_values() {
        let delta = toy_later().diff(&toy_earlier()).unwrap();
        assert_eq!(delta.rows(), vec![vec![-2, 1], vec![2, -1]]);
        assert_eq!(delta.total_delta(), 0);

        let zero = toy_earlier().diff(&toy_earlier()).unwrap();
        assert!(zero.rows().iter().flatten().all(|&e| e == 0));

        let a = ConfusionMatrix::from_counts(vec![vec![1, 0], vec![0, 1]], &partition()).unwrap();
        let b = ConfusionMatrix::from_counts(vec![vec![0, 1], vec![1, 0]], &partition()).unwrap();
        assert_eq!(a.diff(&b).unwrap().rows(), vec![vec![1, -1], vec![-1, 1]]);
    }

    #[test]
    fn diff_rejects_mismatched_partitions() {
        let other = LabelPartition::new(vec!["a", "b", "c"], 0).unwrap();
        let big =
            ConfusionMatrix::from_counts(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], &other)
                .unwrap();
        assert!(matches!(
            toy_earlier().diff(&big).unwrap_err(),
            AuditError::ShapeMismatch { .. }
        ));
    }
}
