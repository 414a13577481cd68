//! Property suites over random matrices, snapshots, and parameter triples.

use proptest::prelude::*;
use tempaudit_core::{
    check_fairness, check_reliability, compute_thresholds, confident_joint, estimate_joint,
    find_label_issues, theorem1_check, theorem2_check, AccuracyBasis, Annotations, AuditConfig,
    ChangeRate, CompletenessResult, ConfusionMatrix, EpsilonDirection, LabelPartition,
    ReliabilityResult, Snapshot, SnapshotSeries, TimeFrame,
};
use tempaudit_testkit::rng::random_snapshot;

fn partition(m: usize) -> LabelPartition {
    LabelPartition::new((0..m).map(|j| format!("c{j}")).collect(), 0).unwrap()
}

prop_compose! {
    fn count_matrix()(m in 2usize..5)(
        counts in prop::collection::vec(0u64..40, m * m),
        m in Just(m),
    ) -> (usize, Vec<u64>) {
        (m, counts)
    }
}

fn matrix_from(m: usize, counts: &[u64]) -> ConfusionMatrix {
    let rows: Vec<Vec<u64>> = counts.chunks(m).map(|c| c.to_vec()).collect();
    ConfusionMatrix::from_counts(rows, &partition(m)).unwrap()
}

prop_compose! {
    fn label_pairs()(m in 2usize..5, n in 1usize..60)(
        predicted in prop::collection::vec(0usize..m, n),
        actual in prop::collection::vec(0usize..m, n),
        shuffle in prop::collection::vec(any::<u32>(), n),
        m in Just(m),
    ) -> (usize, Vec<usize>, Vec<usize>, Vec<u32>) {
        (m, predicted, actual, shuffle)
    }
}

proptest! {
    #[test]
    fn accuracy_and_error_rate_are_complementary((m, counts) in count_matrix()) {
        let cm = matrix_from(m, &counts);
        if cm.total() > 0 {
            let acc = cm.accuracy().unwrap();
            let er = cm.error_rate().unwrap();
            prop_assert!((acc + er - 1.0).abs() < 1e-12);
            // the complement equals the off-diagonal share directly
            let off: u64 = (0..m)
                .flat_map(|i| (0..m).map(move |j| (i, j)))
                .filter(|(i, j)| i != j)
                .map(|(i, j)| cm.count(i, j))
                .sum();
            prop_assert!((er - off as f64 / cm.total() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn confusion_is_permutation_invariant((m, predicted, actual, shuffle) in label_pairs()) {
        let p = partition(m);
        let original = ConfusionMatrix::from_labels(&predicted, &actual, &p).unwrap();
        let mut order: Vec<usize> = (0..predicted.len()).collect();
        order.sort_by_key(|&k| shuffle[k]);
        let shuffled_p: Vec<usize> = order.iter().map(|&k| predicted[k]).collect();
        let shuffled_a: Vec<usize> = order.iter().map(|&k| actual[k]).collect();
        let permuted = ConfusionMatrix::from_labels(&shuffled_p, &shuffled_a, &p).unwrap();
        prop_assert_eq!(original.rows(), permuted.rows());
    }

    #[test]
    fn column_conditionals_sum_to_one((m, counts) in count_matrix()) {
        let cm = matrix_from(m, &counts);
        for j in 0..m {
            if cm.actual_total(j) == 0 {
                continue;
            }
            let mut sum = cm.class_tpr(j).unwrap();
            for i in 0..m {
                if i != j {
                    sum += cm.pair_error_rate(i, j).unwrap();
                }
            }
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diff_is_antisymmetric((m, a) in count_matrix(), b in prop::collection::vec(0u64..40, 16)) {
        let a = matrix_from(m, &a);
        let b = matrix_from(m, &b[..m * m]);
        let ab = a.diff(&b).unwrap();
        let ba = b.diff(&a).unwrap();
        for i in 0..m {
            for j in 0..m {
                prop_assert_eq!(ab.entry(i, j), -ba.entry(i, j));
            }
        }
        prop_assert_eq!(ab.total_delta(), a.total() as i64 - b.total() as i64);
    }

    #[test]
    fn change_rate_is_symmetric(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let ab = ChangeRate::from_accuracies(a, b, 0, 1, AccuracyBasis::Overall).unwrap();
        let ba = ChangeRate::from_accuracies(b, a, 0, 1, AccuracyBasis::Overall).unwrap();
        prop_assert_eq!(ab.epsilon(), ba.epsilon());
        prop_assert!(ab.epsilon() >= 0.0 && ab.epsilon() <= 1.0);
    }

    #[test]
    fn error_rate_deltas_equal_accuracy_deltas((m, a) in count_matrix(), b in prop::collection::vec(1u64..40, 16)) {
        let a = matrix_from(m, &a);
        let b = matrix_from(m, &b[..m * m]);
        if a.total() > 0 {
            let via_er = (b.error_rate().unwrap() - a.error_rate().unwrap()).abs();
            let via_acc = (a.accuracy().unwrap() - b.accuracy().unwrap()).abs();
            prop_assert!((via_er - via_acc).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_estimate_normalizes_and_tracks_marginals(seed in 0u64..10_000) {
        let s = random_snapshot(seed, 12, 4);
        let th = compute_thresholds(&s);
        let cj = confident_joint(&s, &th).unwrap();
        let q = estimate_joint(&cj, &s).unwrap();
        prop_assert!((q.total() - 1.0).abs() < 1e-9);
        let n = s.len() as f64;
        let mut support = vec![0usize; s.classes()];
        for x in 0..s.len() {
            support[s.noisy_label(x)] += 1;
        }
        // rows that normalized carry exactly their noisy frequency share of
        // the (possibly reduced) total mass
        let live_mass: f64 = (0..s.classes())
            .filter(|&i| cj.row_total(i) > 0)
            .map(|i| support[i] as f64 / n)
            .sum();
        for i in 0..s.classes() {
            if cj.row_total(i) > 0 {
                let expected = support[i] as f64 / n / live_mass;
                prop_assert!((q.row_sum(i) - expected).abs() < 1e-9);
            } else {
                prop_assert_eq!(q.row_sum(i), 0.0);
            }
        }
    }

    #[test]
    fn bins_are_disjoint_and_bounded(seed in 0u64..10_000) {
        let s = random_snapshot(seed, 12, 4);
        let th = compute_thresholds(&s);
        let cj = confident_joint(&s, &th).unwrap();
        prop_assert!(cj.total() as usize + cj.unassigned_count() == s.len());
        // each noisy class row holds at most its support
        let mut support = vec![0u64; s.classes()];
        for x in 0..s.len() {
            support[s.noisy_label(x)] += 1;
        }
        for i in 0..s.classes() {
            prop_assert!(cj.row_total(i) <= support[i]);
        }
        // assignments put each datapoint in at most one bin, with its own
        // noisy label on the row side
        for x in 0..s.len() {
            if let Some((i, _)) = cj.assignment(x) {
                prop_assert_eq!(i, s.noisy_label(x));
            }
        }
    }

    /// On well-separated data (one-hot rows peaked at the true label) the
    /// issues found are exactly the datapoints whose noisy label differs
    /// from the true one.
    #[test]
    fn issues_recover_exact_flips_on_separated_data(
        truth in prop::collection::vec(0usize..3, 6..30),
        flips in prop::collection::vec(any::<bool>(), 30),
        targets in prop::collection::vec(1usize..3, 30),
    ) {
        let m = 3;
        // every class keeps an honest, never-flipped representative so all
        // thresholds stay defined and peaked
        let mut truth = truth;
        let flippable = truth.len();
        truth.extend([0, 1, 2]);
        let n = truth.len();
        let ids: Vec<String> = (0..n).map(|k| format!("d{k}")).collect();
        let noisy: Vec<usize> = truth
            .iter()
            .enumerate()
            .map(|(x, &t)| {
                if x < flippable && x < flips.len() && flips[x] {
                    (t + targets[x]) % m
                } else {
                    t
                }
            })
            .collect();
        let rows: Vec<Vec<f64>> = truth
            .iter()
            .map(|&t| (0..m).map(|j| if j == t { 1.0 } else { 0.0 }).collect())
            .collect();
        let s = Snapshot::new(
            0,
            partition(m),
            ids.clone(),
            noisy.clone(),
            rows,
            Some(truth.clone()),
        )
        .unwrap();
        let cj = confident_joint(&s, &compute_thresholds(&s)).unwrap();
        let mut found: Vec<String> =
            find_label_issues(&cj, &s).into_iter().map(|i| i.id).collect();
        found.sort();
        let mut expected: Vec<String> = (0..n)
            .filter(|&x| noisy[x] != truth[x])
            .map(|x| ids[x].clone())
            .collect();
        expected.sort();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn reliability_is_monotone_in_pi(
        acc_a in 0.0f64..=1.0,
        acc_b in 0.0f64..=1.0,
        pi_low in 0.01f64..=1.0,
        pi_high in 0.01f64..=1.0,
    ) {
        let (pi_low, pi_high) = if pi_low <= pi_high { (pi_low, pi_high) } else { (pi_high, pi_low) };
        let frame = TimeFrame::new(vec![0, 1]).unwrap();
        let change = ChangeRate::from_accuracies(acc_a, acc_b, 0, 1, AccuracyBasis::Overall).unwrap();
        let low = ReliabilityResult::from_change_rate(change.clone(), pi_low, frame.clone());
        let high = ReliabilityResult::from_change_rate(change, pi_high, frame);
        if low.reliable {
            prop_assert!(high.reliable);
        }
    }

    #[test]
    fn fairness_is_exactly_the_conjunction(
        complete in any::<bool>(),
        acc_a in 0.0f64..=1.0,
        acc_b in 0.0f64..=1.0,
        pi in 0.01f64..=1.0,
    ) {
        let frame = TimeFrame::new(vec![0, 1]).unwrap();
        let completeness = CompletenessResult {
            complete,
            uncovered: Vec::new(),
            cross_time_coverage: Vec::new(),
            intermediate_only_labels: Vec::new(),
            frame: frame.clone(),
        };
        let change = ChangeRate::from_accuracies(acc_a, acc_b, 0, 1, AccuracyBasis::Overall).unwrap();
        let reliability = ReliabilityResult::from_change_rate(change, pi, frame);
        let verdict = check_fairness(&completeness, &reliability).unwrap();
        prop_assert_eq!(verdict.fair, complete && reliability.reliable);
        if verdict.fair {
            prop_assert!(verdict.completeness.complete && verdict.reliability.reliable);
        }
    }

    /// Theorem 1's biconditional agrees with running the reliability and
    /// fairness predicates when completeness holds.
    #[test]
    fn theorem1_agrees_with_the_pipeline(
        acc_a in 0.0f64..=1.0,
        acc_b in 0.0f64..=1.0,
        pi in 0.01f64..=1.0,
    ) {
        let frame = TimeFrame::new(vec![0, 1]).unwrap();
        let change = ChangeRate::from_accuracies(acc_a, acc_b, 0, 1, AccuracyBasis::Overall).unwrap();
        let theorem = theorem1_check(true, &change, pi).unwrap();
        let completeness = CompletenessResult {
            complete: true,
            uncovered: Vec::new(),
            cross_time_coverage: Vec::new(),
            intermediate_only_labels: Vec::new(),
            frame: frame.clone(),
        };
        let reliability = ReliabilityResult::from_change_rate(change, pi, frame);
        let verdict = check_fairness(&completeness, &reliability).unwrap();
        prop_assert_eq!(theorem.fair, verdict.fair);
    }

    /// A zero-cost extension keeps exactly the fairness the hypothesis
    /// grants, with slack pi - epsilon.
    #[test]
    fn theorem2_with_zero_cost_reduces_to_the_hypothesis(
        eps in 0.0f64..=1.0,
        pi in 0.01f64..=1.0,
    ) {
        match theorem2_check(eps, 0.0, pi) {
            Ok(verdict) => {
                prop_assert!(eps < pi);
                prop_assert!(verdict.remains_fair);
                prop_assert!((verdict.slack - (pi - eps)).abs() < 1e-12);
            }
            Err(_) => prop_assert!(eps >= pi),
        }
    }
}

/// End-to-end pipeline consistency on generated series: whenever the audit
/// finds the label set complete, theorem 1 on the audit's change rate must
/// agree with the fairness verdict.
#[test]
fn theorem1_agrees_on_generated_series() {
    for seed in 0..60u64 {
        let cfg = tempaudit_core::DriftConfig {
            n_datapoints: 40,
            n_classes: 3,
            n_timestamps: 3,
            drift_rate: 0.15,
            noise_rate: 0.1,
            sharpness: 0.9,
            new_label_time: None,
            relabel_each_step: false,
            seed,
            class_names: None,
            new_label_name: None,
        };
        let generated = tempaudit_core::generate(&cfg).unwrap();
        let pi = 0.01 + (seed as f64 % 10.0) / 10.0;
        let config = AuditConfig::new(
            pi,
            generated.series.frame().clone(),
            EpsilonDirection::Shrink,
        )
        .unwrap();
        let completeness = tempaudit_core::check_completeness(
            &generated.manifest,
            &generated.series,
            &generated.truth,
        )
        .unwrap();
        assert!(completeness.complete);
        let reliability = check_reliability(&generated.series, &generated.truth, &config).unwrap();
        let verdict = check_fairness(&completeness, &reliability).unwrap();
        let theorem = theorem1_check(true, &reliability.epsilon, pi).unwrap();
        assert_eq!(theorem.fair, verdict.fair, "seed {seed}");
    }
}

/// Annotated truth and embedded truth describe the same dataset.
#[test]
fn generated_annotations_match_embedded_truth() {
    let cfg = tempaudit_core::DriftConfig {
        n_datapoints: 30,
        n_classes: 3,
        n_timestamps: 3,
        drift_rate: 0.2,
        noise_rate: 0.2,
        sharpness: 0.7,
        new_label_time: None,
        relabel_each_step: false,
        seed: 123,
        class_names: None,
        new_label_name: None,
    };
    let generated = tempaudit_core::generate(&cfg).unwrap();
    for s in generated.series.snapshots() {
        let embedded = s.true_labels().unwrap();
        for x in 0..s.len() {
            let name = generated.truth.get(s.id(x), s.time()).unwrap();
            assert_eq!(s.partition().index_of(name), Some(embedded[x]));
        }
    }
}

/// SnapshotSeries construction double-checks annotations-based confusion:
/// one-hot noisy labels equal to truth give a perfectly diagonal matrix.
#[test]
fn diagonal_confusion_from_agreeing_labels() {
    let p = partition(2);
    let ids: Vec<String> = (0..4).map(|k| format!("d{k}")).collect();
    let noisy = vec![0, 1, 0, 1];
    let rows: Vec<Vec<f64>> = noisy
        .iter()
        .map(|&l| (0..2).map(|j| if j == l { 1.0 } else { 0.0 }).collect())
        .collect();
    let s = Snapshot::new(0, p.clone(), ids.clone(), noisy.clone(), rows, None).unwrap();
    let mut truth = Annotations::new();
    for (id, &l) in ids.iter().zip(&noisy) {
        truth.insert(id.clone(), 0, p.name_of(l).unwrap());
    }
    let sc = tempaudit_core::snapshot_confusion(&s, &truth).unwrap();
    assert_eq!(sc.matrix.accuracy().unwrap(), 1.0);
    assert!(sc.excluded.is_empty());
    let series = SnapshotSeries::new(TimeFrame::new(vec![0]).unwrap(), vec![s]).unwrap();
    assert_eq!(series.len(), 1);
}
