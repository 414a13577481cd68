//! Deterministic random instances for oracle-equivalence suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempaudit_core::{LabelPartition, Snapshot, SnapshotSeries, TimeFrame};

/// A random snapshot with up to `max_n` datapoints and between 2 and
/// `max_m` classes. Probability rows are normalized uniform draws.
pub fn random_snapshot(seed: u64, max_n: usize, max_m: usize) -> Snapshot {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(2..=max_m.max(2));
    snapshot_with(&mut rng, 0, m, &ids(n), true)
}

/// A random series over `2..=max_t` timestamps whose datapoints enter and
/// leave; every snapshot keeps at least one datapoint, every snapshot
/// shares the class universe.
pub fn random_series(seed: u64, max_t: usize, max_n: usize, max_m: usize) -> SnapshotSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_count = rng.gen_range(2..=max_t.max(2));
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(2..=max_m.max(2));
    let universe = ids(n);
    let mut snapshots = Vec::with_capacity(t_count);
    for t in 0..t_count as i64 {
        let mut present: Vec<String> = universe
            .iter()
            .filter(|_| rng.gen_bool(0.8))
            .cloned()
            .collect();
        if present.is_empty() {
            present.push(universe[rng.gen_range(0..n)].clone());
        }
        snapshots.push(snapshot_with(&mut rng, t, m, &present, false));
    }
    let frame = TimeFrame::new((0..t_count as i64).collect()).unwrap();
    SnapshotSeries::new(frame, snapshots).unwrap()
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("d{k}")).collect()
}

fn snapshot_with(
    rng: &mut ChaCha8Rng,
    time: i64,
    m: usize,
    ids: &[String],
    embed_truth: bool,
) -> Snapshot {
    let partition = LabelPartition::new((0..m).map(|j| format!("c{j}")).collect(), time).unwrap();
    let noisy: Vec<usize> = ids.iter().map(|_| rng.gen_range(0..m)).collect();
    let rows: Vec<Vec<f64>> = ids
        .iter()
        .map(|_| {
            let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.01..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.iter().map(|v| v / sum).collect()
        })
        .collect();
    let truth = embed_truth.then(|| ids.iter().map(|_| rng.gen_range(0..m)).collect());
    Snapshot::new(time, partition, ids.to_vec(), noisy, rows, truth).unwrap()
}
