use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use tempaudit_core::{
    check_completeness, check_fairness, check_reliability, compute_thresholds, confident_joint,
    estimate_joint, find_label_issues, generate, temporal_confident_joint_pair, AuditConfig,
    DriftConfig, EpsilonDirection, Generated,
};

fn config(n: usize, timestamps: usize) -> DriftConfig {
    DriftConfig {
        n_datapoints: n,
        n_classes: 5,
        n_timestamps: timestamps,
        drift_rate: 0.05,
        noise_rate: 0.1,
        sharpness: 0.9,
        new_label_time: None,
        relabel_each_step: false,
        seed: 7,
        class_names: None,
        new_label_name: None,
    }
}

fn bench_confident_learning(c: &mut Criterion) {
    let mut group = c.benchmark_group("confident_learning");
    for n in [1_000usize, 10_000] {
        let generated = generate(&config(n, 2)).unwrap();
        let snapshot = generated.series.first().clone();
        group.bench_with_input(BenchmarkId::from_parameter(n), &snapshot, |b, s| {
            b.iter(|| {
                let thresholds = compute_thresholds(s);
                let joint = confident_joint(s, &thresholds).unwrap();
                let estimate = estimate_joint(&joint, s).unwrap();
                let issues = find_label_issues(&joint, s);
                black_box((estimate, issues))
            })
        });
    }
    group.finish();
}

fn bench_temporal_joints(c: &mut Criterion) {
    let generated = generate(&config(2_000, 4)).unwrap();
    c.bench_function("temporal_joint_pair_2000x4", |b| {
        b.iter(|| {
            let mut total = 0u64;
            for wrong in 0..5 {
                for correct in 0..5 {
                    total +=
                        temporal_confident_joint_pair(&generated.series, wrong, correct).unwrap();
                }
            }
            black_box(total)
        })
    });
}

fn bench_full_audit(c: &mut Criterion) {
    let Generated {
        series,
        truth,
        manifest,
    } = generate(&config(2_000, 4)).unwrap();
    let audit_config =
        AuditConfig::new(0.5, series.frame().clone(), EpsilonDirection::Shrink).unwrap();
    c.bench_function("audit_predicates_2000x4", |b| {
        b.iter(|| {
            let completeness = check_completeness(&manifest, &series, &truth).unwrap();
            let reliability = check_reliability(&series, &truth, &audit_config).unwrap();
            black_box(check_fairness(&completeness, &reliability).unwrap())
        })
    });
}

criterion_group!(
    benches,
    bench_confident_learning,
    bench_temporal_joints,
    bench_full_audit
);
criterion_main!(benches);
