//! Temporal extensions: snapshot series, accuracy change rates, temporal
//! confident joints, and the drift-adjusted error probability.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cl::{compute_thresholds, confident_joint};
use crate::confusion::ConfusionMatrix;
use crate::error::{AuditError, Result};
use crate::label::TimeFrame;
use crate::snapshot::{Annotations, Snapshot};

/// Snapshots of one dataset over a time frame. Datapoints may enter and
/// leave between timestamps; the label partition stays fixed so counts and
/// rates remain comparable across times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSeries {
    frame: TimeFrame,
    snapshots: Vec<Snapshot>,
}

impl SnapshotSeries {
    pub fn new(frame: TimeFrame, snapshots: Vec<Snapshot>) -> Result<Self> {
        if frame.len() != snapshots.len() {
            return Err(AuditError::InvariantViolation {
                detail: format!(
                    "frame has {} timestamps but {} snapshots were given",
                    frame.len(),
                    snapshots.len()
                ),
            });
        }
        for (t, s) in frame.timestamps().iter().zip(&snapshots) {
            if s.time() != *t {
                return Err(AuditError::InvariantViolation {
                    detail: format!("snapshot at time {} placed at frame slot {t}", s.time()),
                });
            }
        }
        if let Some(first) = snapshots.first() {
            for s in &snapshots[1..] {
                if !s.partition().same_labels(first.partition()) {
                    return Err(AuditError::InvariantViolation {
                        detail: format!(
                            "snapshot at time {} uses a different label partition",
                            s.time()
                        ),
                    });
                }
            }
        }
        Ok(Self { frame, snapshots })
    }

    pub fn frame(&self) -> &TimeFrame {
        &self.frame
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn first(&self) -> &Snapshot {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("series is never empty")
    }
}

/// Which accuracy was compared to produce a change rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AccuracyBasis {
    /// Overall diagonal rate of the confusion matrix.
    Overall,
    /// Class-conditional accuracy (per-class true positive rate).
    ClassConditional { class: usize },
}

/// Absolute accuracy difference between two timestamps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeRate {
    epsilon: f64,
    from_time: i64,
    to_time: i64,
    from_accuracy: f64,
    to_accuracy: f64,
    basis: AccuracyBasis,
}

impl ChangeRate {
    /// The change rate between two accuracies; symmetric in its accuracy
    /// arguments because the difference is taken in absolute value.
    pub fn from_accuracies(
        from_accuracy: f64,
        to_accuracy: f64,
        from_time: i64,
        to_time: i64,
        basis: AccuracyBasis,
    ) -> Result<Self> {
        for (what, value) in [
            ("from accuracy", from_accuracy),
            ("to accuracy", to_accuracy),
        ] {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(AuditError::OutOfRange {
                    what: what.into(),
                    value,
                });
            }
        }
        Ok(Self {
            epsilon: (from_accuracy - to_accuracy).abs(),
            from_time,
            to_time,
            from_accuracy,
            to_accuracy,
            basis,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn from_time(&self) -> i64 {
        self.from_time
    }

    pub fn to_time(&self) -> i64 {
        self.to_time
    }

    pub fn from_accuracy(&self) -> f64 {
        self.from_accuracy
    }

    pub fn to_accuracy(&self) -> f64 {
        self.to_accuracy
    }

    pub fn basis(&self) -> AccuracyBasis {
        self.basis
    }
}

/// A snapshot's confusion matrix against annotated truth.
///
/// Datapoints whose truth label is not in the snapshot's partition cannot
/// be placed in the matrix; they are listed in `excluded` (the completeness
/// audit accounts for them). A datapoint with no annotation at the
/// snapshot's time is an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotConfusion {
    pub matrix: ConfusionMatrix,
    pub excluded: Vec<String>,
}

pub fn snapshot_confusion(snapshot: &Snapshot, truth: &Annotations) -> Result<SnapshotConfusion> {
    let mut predicted = Vec::with_capacity(snapshot.len());
    let mut actual = Vec::with_capacity(snapshot.len());
    let mut excluded = Vec::new();
    for x in 0..snapshot.len() {
        let id = snapshot.id(x);
        let name = truth
            .get(id, snapshot.time())
            .ok_or_else(|| AuditError::MissingTruth {
                id: id.to_string(),
                time: snapshot.time(),
            })?;
        match snapshot.partition().index_of(name) {
            Some(actual_index) => {
                predicted.push(snapshot.noisy_label(x));
                actual.push(actual_index);
            }
            None => excluded.push(id.to_string()),
        }
    }
    let matrix = ConfusionMatrix::from_labels(&predicted, &actual, snapshot.partition())?;
    Ok(SnapshotConfusion { matrix, excluded })
}

fn accuracy_on(matrix: &ConfusionMatrix, basis: AccuracyBasis) -> Result<f64> {
    match basis {
        AccuracyBasis::Overall => matrix.accuracy(),
        AccuracyBasis::ClassConditional { class } => matrix.class_tpr(class),
    }
}

/// Change rate between two snapshots under one accuracy basis.
pub fn pair_change_rate(
    earlier: &Snapshot,
    later: &Snapshot,
    truth: &Annotations,
    basis: AccuracyBasis,
) -> Result<ChangeRate> {
    let from = snapshot_confusion(earlier, truth)?;
    let to = snapshot_confusion(later, truth)?;
    ChangeRate::from_accuracies(
        accuracy_on(&from.matrix, basis)?,
        accuracy_on(&to.matrix, basis)?,
        earlier.time(),
        later.time(),
        basis,
    )
}

/// Endpoint change rate of a series under one accuracy basis. Intermediate
/// snapshots do not enter the comparison.
pub fn series_change_rate(
    series: &SnapshotSeries,
    truth: &Annotations,
    basis: AccuracyBasis,
) -> Result<ChangeRate> {
    if series.len() < 2 {
        return Err(AuditError::SeriesTooShort {
            len: series.len(),
            min: 2,
        });
    }
    pair_change_rate(series.first(), series.last(), truth, basis)
}

/// The largest class-conditional change rate between two snapshots.
///
/// Accuracy drift in any single class marks the system unreliable even when
/// gains elsewhere keep the overall rate flat, so reliability audits compare
/// the worst class. Classes without actual-label mass at both times cannot
/// be compared and are skipped.
pub fn worst_class_change_rate(
    earlier: &Snapshot,
    later: &Snapshot,
    truth: &Annotations,
) -> Result<ChangeRate> {
    let from = snapshot_confusion(earlier, truth)?;
    let to = snapshot_confusion(later, truth)?;
    let mut worst: Option<ChangeRate> = None;
    for class in 0..earlier.classes() {
        let (Ok(a), Ok(b)) = (from.matrix.class_tpr(class), to.matrix.class_tpr(class)) else {
            continue;
        };
        let candidate = ChangeRate::from_accuracies(
            a,
            b,
            earlier.time(),
            later.time(),
            AccuracyBasis::ClassConditional { class },
        )?;
        if worst
            .as_ref()
            .is_none_or(|w| candidate.epsilon() > w.epsilon())
        {
            worst = Some(candidate);
        }
    }
    worst.ok_or(AuditError::ZeroMarginal {
        class: 0,
        side: "actual (no class has mass at both endpoints)",
    })
}

/// Worst-class change rate between the series endpoints; the audit's
/// epsilon over the whole frame.
pub fn series_worst_class_change_rate(
    series: &SnapshotSeries,
    truth: &Annotations,
) -> Result<ChangeRate> {
    if series.len() < 2 {
        return Err(AuditError::SeriesTooShort {
            len: series.len(),
            min: 2,
        });
    }
    worst_class_change_rate(series.first(), series.last(), truth)
}

/// How drift scales the earlier noisy-label marginal in the temporal error
/// probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpsilonDirection {
    /// Scale by `1 - epsilon`: drift erodes the earlier marginal.
    Shrink,
    /// Scale by `1 + epsilon`: drift inflates it; results clamp at 1.
    Grow,
}

impl std::fmt::Display for EpsilonDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EpsilonDirection::Shrink => write!(f, "shrink"),
            EpsilonDirection::Grow => write!(f, "grow"),
        }
    }
}

/// Probability that label `wrong` is assigned at the later time given label
/// `correct` held at the earlier time, with the drift adjustment applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalErrorProbability {
    pub wrong: usize,
    pub correct: usize,
    /// Final value, clamped into [0, 1].
    pub value: f64,
    /// Pre-clamp value; exceeds 1 only under the grow direction.
    pub raw: f64,
    pub clamped: bool,
    pub direction: EpsilonDirection,
    pub epsilon: f64,
}

/// Evaluate the drift-adjusted error probability between two confusion
/// matrices.
///
/// The conditional `p(correct | wrong)` is taken at the later time; the
/// noisy-label marginal at the earlier time is scaled multiplicatively by
/// `1 -/+ epsilon` (an additive adjustment would exceed 1 and is not a
/// probability); the result is normalized by the earlier actual-label
/// marginal.
pub fn temporal_error_probability(
    later: &ConfusionMatrix,
    earlier: &ConfusionMatrix,
    change: &ChangeRate,
    wrong: usize,
    correct: usize,
    direction: EpsilonDirection,
) -> Result<TemporalErrorProbability> {
    if !later.class_order().same_labels(earlier.class_order()) {
        return Err(AuditError::ShapeMismatch {
            detail: "confusion matrices cover different label partitions".into(),
        });
    }
    let m = later.classes();
    for index in [wrong, correct] {
        if index >= m {
            return Err(AuditError::IndexOutOfRange { index, classes: m });
        }
    }
    if wrong == correct {
        return Err(AuditError::SameLabel { label: wrong });
    }
    let later_total = later.total();
    let earlier_total = earlier.total();
    if later_total == 0 || earlier_total == 0 {
        return Err(AuditError::EmptyMatrix);
    }
    let wrong_marginal_later = later.predicted_total(wrong);
    if wrong_marginal_later == 0 {
        return Err(AuditError::ZeroMarginal {
            class: wrong,
            side: "predicted at later time",
        });
    }
    let correct_marginal_earlier = earlier.actual_total(correct);
    if correct_marginal_earlier == 0 {
        return Err(AuditError::ZeroMarginal {
            class: correct,
            side: "actual at earlier time",
        });
    }

    let joint_later = later.count(wrong, correct) as f64 / later_total as f64;
    let p_wrong_later = wrong_marginal_later as f64 / later_total as f64;
    let p_wrong_earlier = earlier.predicted_total(wrong) as f64 / earlier_total as f64;
    let p_correct_earlier = correct_marginal_earlier as f64 / earlier_total as f64;

    let eps = change.epsilon();
    let factor = match direction {
        EpsilonDirection::Shrink => 1.0 - eps,
        EpsilonDirection::Grow => 1.0 + eps,
    };
    let raw = (joint_later / p_wrong_later) * (p_wrong_earlier * factor) / p_correct_earlier;
    let clamped = raw > 1.0;
    Ok(TemporalErrorProbability {
        wrong,
        correct,
        value: if clamped { 1.0 } else { raw },
        raw,
        clamped,
        direction,
        epsilon: eps,
    })
}

/// Per-snapshot confident assignments keyed by datapoint id.
fn assignments_by_id(snapshot: &Snapshot) -> Result<HashMap<String, Option<usize>>> {
    let thresholds = compute_thresholds(snapshot);
    let joint = confident_joint(snapshot, &thresholds)?;
    Ok((0..snapshot.len())
        .map(|x| {
            (
                snapshot.id(x).to_string(),
                joint.assignment(x).map(|(_, estimated)| estimated),
            )
        })
        .collect())
}

fn require_pairable(series: &SnapshotSeries) -> Result<()> {
    if series.len() < 2 {
        return Err(AuditError::SeriesTooShort {
            len: series.len(),
            min: 2,
        });
    }
    Ok(())
}

/// Count, over every ordered pair of timestamps, the datapoints noisy-labeled
/// `wrong` at the later time that were confidently in class `correct` at the
/// earlier time. Membership needs presence at both times; the earlier "true"
/// class is the confident-joint bin of that snapshot, since the latent label
/// is unobservable.
pub fn temporal_confident_joint_pair(
    series: &SnapshotSeries,
    wrong: usize,
    correct: usize,
) -> Result<u64> {
    require_pairable(series)?;
    let assignments: Vec<HashMap<String, Option<usize>>> = series
        .snapshots()
        .iter()
        .map(assignments_by_id)
        .collect::<Result<_>>()?;
    let mut count = 0u64;
    for n in 1..series.len() {
        let later = &series.snapshots()[n];
        for earlier in &assignments[..n] {
            for x in 0..later.len() {
                if later.noisy_label(x) != wrong {
                    continue;
                }
                if earlier.get(later.id(x)) == Some(&Some(correct)) {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// As [`temporal_confident_joint_pair`] with the same label on both sides:
/// datapoints whose label `label` was confidently correct earlier and is the
/// given noisy label later.
pub fn temporal_confident_joint_fixed(series: &SnapshotSeries, label: usize) -> Result<u64> {
    temporal_confident_joint_pair(series, label, label)
}

/// Exact variant of [`temporal_confident_joint_pair`] for simulated data:
/// the earlier true class is read from the snapshot's ground-truth labels
/// instead of the confident joint.
pub fn temporal_exact_joint_pair(
    series: &SnapshotSeries,
    wrong: usize,
    correct: usize,
) -> Result<u64> {
    require_pairable(series)?;
    let mut truth_by_id: Vec<HashMap<&str, usize>> = Vec::with_capacity(series.len());
    for s in series.snapshots() {
        let labels = s.true_labels().ok_or_else(|| AuditError::MissingTruth {
            id: "<embedded true labels>".into(),
            time: s.time(),
        })?;
        truth_by_id.push(
            (0..s.len())
                .map(|x| (s.id(x), labels[x]))
                .collect::<HashMap<_, _>>(),
        );
    }
    let mut count = 0u64;
    for n in 1..series.len() {
        let later = &series.snapshots()[n];
        for earlier in &truth_by_id[..n] {
            for x in 0..later.len() {
                if later.noisy_label(x) == wrong && earlier.get(later.id(x)) == Some(&correct) {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Datapoint ids whose confident class differs between two snapshots of the
/// series (both assignments present). Sorted and deduplicated; evidence for
/// chronological-bias tagging.
pub fn confident_flips(series: &SnapshotSeries) -> Result<Vec<String>> {
    let assignments: Vec<HashMap<String, Option<usize>>> = series
        .snapshots()
        .iter()
        .map(assignments_by_id)
        .collect::<Result<_>>()?;
    let mut flipped = Vec::new();
    for (a, earlier) in assignments.iter().enumerate() {
        for later in &assignments[a + 1..] {
            for (id, earlier_class) in earlier {
                let (Some(e), Some(Some(l))) = (earlier_class, later.get(id)) else {
                    continue;
                };
                if e != l {
                    flipped.push(id.clone());
                }
            }
        }
    }
    flipped.sort();
    flipped.dedup();
    Ok(flipped)
}
