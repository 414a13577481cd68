//! Brute-force reference computations.
//!
//! Each function transcribes its defining formula directly: per-class
//! thresholds as explicit means, confident-joint membership by enumerating
//! every (datapoint, class) pair, the joint estimate as the written-out
//! two-stage normalization, and the temporal joints as an exhaustive sum
//! over (later time, offset, datapoint) triples.

use tempaudit_core::{Snapshot, SnapshotSeries};

/// Per-datapoint (noisy, estimated-true) bins, `None` when unassigned.
pub type BinAssignments = Vec<Option<(usize, usize)>>;

/// Mean self-confidence per class, `None` where the class has no noisy
/// labels.
pub fn thresholds(snapshot: &Snapshot) -> Vec<Option<f64>> {
    let m = snapshot.classes();
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let mut sum = 0.0;
        let mut count = 0usize;
        for x in 0..snapshot.len() {
            if snapshot.noisy_label(x) == j {
                sum += snapshot.prob(x, j);
                count += 1;
            }
        }
        out.push(if count > 0 {
            Some(sum / count as f64)
        } else {
            None
        });
    }
    out
}

/// The confident class of one datapoint: among classes whose threshold is
/// defined and met, the one with the highest predicted probability, lowest
/// index on ties.
pub fn confident_class(snapshot: &Snapshot, thresholds: &[Option<f64>], x: usize) -> Option<usize> {
    let mut qualifying: Vec<usize> = Vec::new();
    for (l, t) in thresholds.iter().enumerate() {
        if let Some(t) = t {
            if snapshot.prob(x, l) >= *t {
                qualifying.push(l);
            }
        }
    }
    let mut best: Option<usize> = None;
    for &l in &qualifying {
        best = match best {
            None => Some(l),
            Some(b) if snapshot.prob(x, l) > snapshot.prob(x, b) => Some(l),
            Some(b) => Some(b),
        };
    }
    best
}

/// Confident-joint counts and per-datapoint assignments by exhaustive
/// enumeration.
pub fn confident_joint(
    snapshot: &Snapshot,
    thresholds: &[Option<f64>],
) -> (Vec<Vec<u64>>, BinAssignments) {
    let m = snapshot.classes();
    let mut counts = vec![vec![0u64; m]; m];
    let mut assigned = Vec::with_capacity(snapshot.len());
    for x in 0..snapshot.len() {
        match confident_class(snapshot, thresholds, x) {
            Some(j) => {
                let i = snapshot.noisy_label(x);
                counts[i][j] += 1;
                assigned.push(Some((i, j)));
            }
            None => assigned.push(None),
        }
    }
    (counts, assigned)
}

/// The two-stage normalization, written out: row-normalize, scale by the
/// class's noisy count, divide by the sum of all scaled entries. Rows whose
/// count vector is all zero contribute nothing.
pub fn joint_estimate(counts: &[Vec<u64>], snapshot: &Snapshot) -> Option<Vec<Vec<f64>>> {
    let m = snapshot.classes();
    let mut support = vec![0u64; m];
    for x in 0..snapshot.len() {
        support[snapshot.noisy_label(x)] += 1;
    }
    let mut scaled = vec![vec![0.0f64; m]; m];
    let mut denominator = 0.0;
    for i in 0..m {
        let row_sum: u64 = counts[i].iter().sum();
        if row_sum == 0 {
            continue;
        }
        for j in 0..m {
            let value = counts[i][j] as f64 / row_sum as f64 * support[i] as f64;
            scaled[i][j] = value;
            denominator += value;
        }
    }
    if denominator == 0.0 {
        return None;
    }
    for row in scaled.iter_mut() {
        for value in row.iter_mut() {
            *value /= denominator;
        }
    }
    Some(scaled)
}

/// Off-diagonal datapoints ordered by (self-confidence, id).
pub fn label_issues(snapshot: &Snapshot) -> Vec<(String, usize, usize, f64)> {
    let th = thresholds(snapshot);
    let (_, assigned) = confident_joint(snapshot, &th);
    let mut issues: Vec<(String, usize, usize, f64)> = assigned
        .iter()
        .enumerate()
        .filter_map(|(x, bin)| match bin {
            Some((i, j)) if i != j => Some((
                snapshot.id(x).to_string(),
                *i,
                *j,
                snapshot.prob(x, snapshot.noisy_label(x)),
            )),
            _ => None,
        })
        .collect();
    issues.sort_by(|a, b| a.3.total_cmp(&b.3).then_with(|| a.0.cmp(&b.0)));
    issues
}

/// Per-snapshot confident class of a datapoint id, or `None` when the id is
/// absent or unassigned at that snapshot.
fn assignment_of(snapshot: &Snapshot, id: &str) -> Option<usize> {
    let th = thresholds(snapshot);
    let x = (0..snapshot.len()).find(|&x| snapshot.id(x) == id)?;
    confident_class(snapshot, &th, x)
}

/// Temporal confident joint for the (wrong, correct) label pair: an
/// exhaustive triple loop over later timestamps, earlier offsets, and
/// datapoints. A datapoint counts once per ordered time pair when it is
/// present at both times, noisy-labeled `wrong` at the later one, and
/// confidently in `correct` at the earlier one.
pub fn temporal_joint_pair(series: &SnapshotSeries, wrong: usize, correct: usize) -> u64 {
    let snapshots = series.snapshots();
    let mut count = 0u64;
    for n in 0..snapshots.len() {
        for m in 1..=n {
            let later = &snapshots[n];
            let earlier = &snapshots[n - m];
            for x in 0..later.len() {
                if later.noisy_label(x) != wrong {
                    continue;
                }
                if assignment_of(earlier, later.id(x)) == Some(correct) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Temporal confident joint with the label fixed on both sides.
pub fn temporal_joint_fixed(series: &SnapshotSeries, label: usize) -> u64 {
    temporal_joint_pair(series, label, label)
}
