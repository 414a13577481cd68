//! Label-error detection and temporal fairness auditing for classification
//! datasets.
//!
//! The crate takes predicted probabilities and noisy labels as data — it
//! never trains or owns a model — and offers:
//!
//! - confusion-matrix construction with the scalar rates derived from it
//!   ([`confusion`]);
//! - confident learning on a single snapshot: per-class thresholds, the
//!   confident joint, the normalized joint estimate, and ranked label
//!   issues ([`cl`]);
//! - temporal extensions across snapshot series: change rates, temporal
//!   confident joints, and drift-adjusted error probabilities
//!   ([`temporal`]);
//! - the audit predicates of completeness, reliability, and fairness with
//!   bias-type tagging ([`fairness`]);
//! - a deterministic synthetic-data generator for ground-truth experiments
//!   ([`driftgen`]).

pub mod cl;
pub mod confusion;
pub mod driftgen;
pub mod error;
pub mod fairness;
pub mod label;
pub mod snapshot;
pub mod temporal;

pub use cl::{
    compute_thresholds, confident_joint, estimate_joint, find_label_issues, ConfidentJoint,
    JointEstimate, LabelIssue, Thresholds,
};
pub use confusion::{ConfusionDelta, ConfusionMatrix};
pub use driftgen::{generate, DriftConfig, Generated};
pub use error::{AuditError, Result};
pub use fairness::{
    check_completeness, check_fairness, check_reliability, tag_biases, theorem1_check,
    theorem2_check, AuditConfig, AuditVerdict, BiasKind, BiasTag, CompletenessResult,
    CrossTimeCoverage, ExtensionVerdict, LabelSetManifest, ReliabilityResult, TheoremVerdict,
    UncoveredDatapoint,
};
pub use label::{ClassLabel, LabelPartition, TimeFrame};
pub use snapshot::{Annotations, Snapshot};
pub use temporal::{
    confident_flips, pair_change_rate, series_change_rate, series_worst_class_change_rate,
    snapshot_confusion, temporal_confident_joint_fixed, temporal_confident_joint_pair,
    temporal_error_probability, temporal_exact_joint_pair, worst_class_change_rate, AccuracyBasis,
    ChangeRate, EpsilonDirection, SnapshotConfusion, SnapshotSeries, TemporalErrorProbability,
};
