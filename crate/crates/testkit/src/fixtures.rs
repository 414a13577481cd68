//! Shared fixtures: the two-snapshot male/female toy dataset whose
//! confusion matrices are `[[4,2],[1,3]]` at time 1 and `[[2,3],[3,2]]` at
//! time 2.

use std::collections::BTreeMap;

use tempaudit_core::{
    Annotations, LabelPartition, LabelSetManifest, Snapshot, SnapshotSeries, TimeFrame,
};

pub const MALE: usize = 0;
pub const FEMALE: usize = 1;

/// (predicted, actual) pairs realizing `[[4,2],[1,3]]`.
#[rustfmt::skip]
pub fn toy_pairs_t1() -> Vec<(usize, usize)> {
    vec![
        (MALE, MALE),
        (MALE, MALE),
        (MALE, MALE),
        (MALE, MALE),
        (MALE, FEMALE),
        (MALE, FEMALE),
        (FEMALE, MALE),
        (FEMALE, FEMALE),
        (FEMALE, FEMALE),
        (FEMALE, FEMALE),
    ]
}

/// (predicted, actual) pairs realizing `[[2,3],[3,2]]`.
#[rustfmt::skip]
pub fn toy_pairs_t2() -> Vec<(usize, usize)> {
    vec![
        (MALE, MALE),
        (MALE, MALE),
        (MALE, FEMALE),
        (MALE, FEMALE),
        (MALE, FEMALE),
        (FEMALE, MALE),
        (FEMALE, MALE),
        (FEMALE, MALE),
        (FEMALE, FEMALE),
        (FEMALE, FEMALE),
    ]
}

pub fn toy_partition(time: i64) -> LabelPartition {
    LabelPartition::new(vec!["male", "female"], time).unwrap()
}

/// A snapshot over ids d0..d9 whose noisy labels are the predicted side of
/// `pairs`; the actual side lands in `truth`. Probability rows are one-hot
/// on the noisy label.
pub fn snapshot_from_pairs(
    time: i64,
    pairs: &[(usize, usize)],
    truth: &mut Annotations,
) -> Snapshot {
    let partition = toy_partition(time);
    let ids: Vec<String> = (0..pairs.len()).map(|k| format!("d{k}")).collect();
    let noisy: Vec<usize> = pairs.iter().map(|&(p, _)| p).collect();
    let rows: Vec<Vec<f64>> = noisy
        .iter()
        .map(|&l| {
            (0..partition.len())
                .map(|j| if j == l { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    for (id, &(_, actual)) in ids.iter().zip(pairs) {
        truth.insert(id.clone(), time, partition.name_of(actual).unwrap());
    }
    Snapshot::new(time, partition, ids, noisy, rows, None).unwrap()
}

/// The full toy fixture: series at times 1 and 2, annotations, and the
/// binary manifest.
pub fn toy_fixture() -> (SnapshotSeries, Annotations, LabelSetManifest) {
    let mut truth = Annotations::new();
    let s1 = snapshot_from_pairs(1, &toy_pairs_t1(), &mut truth);
    let s2 = snapshot_from_pairs(2, &toy_pairs_t2(), &mut truth);
    let frame = TimeFrame::new(vec![1, 2]).unwrap();
    let series = SnapshotSeries::new(frame.clone(), vec![s1, s2]).unwrap();
    let mut partitions = BTreeMap::new();
    partitions.insert(1, toy_partition(1));
    partitions.insert(2, toy_partition(2));
    let manifest = LabelSetManifest::new(partitions, &frame).unwrap();
    (series, truth, manifest)
}
