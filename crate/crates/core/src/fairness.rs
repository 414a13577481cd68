//! Audit predicates: label-set completeness over a time frame, reliability
//! under a safety threshold, the composite fairness verdict, theorem-level
//! consistency checks, and bias-type tagging.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};
use crate::label::{LabelPartition, TimeFrame};
use crate::snapshot::Annotations;
use crate::temporal::{
    series_worst_class_change_rate, ChangeRate, EpsilonDirection, SnapshotSeries,
};

/// Label partitions declared per timestamp. Partitions at different times
/// may overlap or grow; completeness compares truth against the union of
/// the endpoint partitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelSetManifest {
    partitions: BTreeMap<i64, LabelPartition>,
}

impl LabelSetManifest {
    /// Build a manifest whose timestamps all belong to `frame` and which
    /// declares partitions at both frame endpoints.
    pub fn new(partitions: BTreeMap<i64, LabelPartition>, frame: &TimeFrame) -> Result<Self> {
        for t in partitions.keys() {
            if !frame.contains(*t) {
                return Err(AuditError::FrameMismatch {
                    detail: format!("manifest declares partition at {t}, not an audit timestamp"),
                });
            }
        }
        for endpoint in [frame.first(), frame.last()] {
            if !partitions.contains_key(&endpoint) {
                return Err(AuditError::FrameMismatch {
                    detail: format!("manifest lacks a partition at frame endpoint {endpoint}"),
                });
            }
        }
        Ok(Self { partitions })
    }

    pub fn partition_at(&self, time: i64) -> Option<&LabelPartition> {
        self.partitions.get(&time)
    }

    pub fn partitions(&self) -> &BTreeMap<i64, LabelPartition> {
        &self.partitions
    }
}

/// Audit parameters: the safety threshold, the frame under audit, and the
/// drift direction for temporal error probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pi: f64,
    frame: TimeFrame,
    epsilon_direction: EpsilonDirection,
}

impl AuditConfig {
    pub fn new(pi: f64, frame: TimeFrame, epsilon_direction: EpsilonDirection) -> Result<Self> {
        if !(pi > 0.0 && pi <= 1.0) {
            return Err(AuditError::OutOfRange {
                what: "safety threshold pi".into(),
                value: pi,
            });
        }
        Ok(Self {
            pi,
            frame,
            epsilon_direction,
        })
    }

    pub fn pi(&self) -> f64 {
        self.pi
    }

    pub fn frame(&self) -> &TimeFrame {
        &self.frame
    }

    pub fn epsilon_direction(&self) -> EpsilonDirection {
        self.epsilon_direction
    }
}

/// A datapoint whose correct label is missing from the endpoint label-set
/// union at a time it is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncoveredDatapoint {
    pub id: String,
    pub time: i64,
    pub needed_label: String,
}

/// A datapoint covered only because the endpoint union lends a label its
/// own-time partition does not declare. Informational, not a failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossTimeCoverage {
    pub id: String,
    pub time: i64,
    pub label: String,
}

/// Outcome of the completeness audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessResult {
    pub complete: bool,
    pub uncovered: Vec<UncoveredDatapoint>,
    /// Coverage borrowed from the other endpoint's partition.
    pub cross_time_coverage: Vec<CrossTimeCoverage>,
    /// Labels declared only at intermediate timestamps; the endpoint union
    /// ignores them, so they are surfaced rather than silently dropped.
    pub intermediate_only_labels: Vec<String>,
    pub frame: TimeFrame,
}

/// Every datapoint present anywhere in the series must have its correct
/// label in the union of the two endpoint partitions.
pub fn check_completeness(
    manifest: &LabelSetManifest,
    series: &SnapshotSeries,
    truth: &Annotations,
) -> Result<CompletenessResult> {
    let frame = series.frame().clone();
    let first = manifest
        .partition_at(frame.first())
        .ok_or_else(|| AuditError::FrameMismatch {
            detail: format!("no partition at frame start {}", frame.first()),
        })?;
    let last = manifest
        .partition_at(frame.last())
        .ok_or_else(|| AuditError::FrameMismatch {
            detail: format!("no partition at frame end {}", frame.last()),
        })?;
    let in_union = |name: &str| first.index_of(name).is_some() || last.index_of(name).is_some();

    let mut uncovered = Vec::new();
    let mut cross_time_coverage = Vec::new();
    for snapshot in series.snapshots() {
        let time = snapshot.time();
        let local = manifest.partition_at(time);
        for id in snapshot.ids() {
            let needed = truth
                .get(id, time)
                .ok_or_else(|| AuditError::MissingTruth {
                    id: id.clone(),
                    time,
                })?;
            if !in_union(needed) {
                uncovered.push(UncoveredDatapoint {
                    id: id.clone(),
                    time,
                    needed_label: needed.to_string(),
                });
            } else if let Some(local) = local {
                if local.index_of(needed).is_none() {
                    cross_time_coverage.push(CrossTimeCoverage {
                        id: id.clone(),
                        time,
                        label: needed.to_string(),
                    });
                }
            }
        }
    }

    let mut intermediate_only_labels: Vec<String> = manifest
        .partitions()
        .iter()
        .filter(|(t, _)| **t != frame.first() && **t != frame.last())
        .flat_map(|(_, p)| p.names().map(String::from).collect::<Vec<_>>())
        .filter(|name| !in_union(name))
        .collect();
    intermediate_only_labels.sort();
    intermediate_only_labels.dedup();

    Ok(CompletenessResult {
        complete: uncovered.is_empty(),
        uncovered,
        cross_time_coverage,
        intermediate_only_labels,
        frame,
    })
}

/// Outcome of the reliability audit: the endpoint change rate against the
/// safety threshold, strict inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityResult {
    pub reliable: bool,
    pub epsilon: ChangeRate,
    pub pi: f64,
    pub frame: TimeFrame,
}

impl ReliabilityResult {
    /// Assemble a result from an already-computed change rate.
    pub fn from_change_rate(epsilon: ChangeRate, pi: f64, frame: TimeFrame) -> Self {
        Self {
            reliable: epsilon.epsilon() < pi,
            epsilon,
            pi,
            frame,
        }
    }
}

/// Reliable iff the worst-class endpoint change rate stays strictly below
/// the configured threshold.
pub fn check_reliability(
    series: &SnapshotSeries,
    truth: &Annotations,
    config: &AuditConfig,
) -> Result<ReliabilityResult> {
    if config.frame() != series.frame() {
        return Err(AuditError::FrameMismatch {
            detail: "audit config frame differs from series frame".into(),
        });
    }
    let epsilon = series_worst_class_change_rate(series, truth)?;
    Ok(ReliabilityResult::from_change_rate(
        epsilon,
        config.pi(),
        series.frame().clone(),
    ))
}

/// Bias types from the data/label taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BiasKind {
    Behavioral,
    Exclusion,
    Historical,
    TimeInterval,
    LabelQuality,
    Chronological,
    Misclassification,
}

impl BiasKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BiasKind::Behavioral => "behavioral",
            BiasKind::Exclusion => "exclusion",
            BiasKind::Historical => "historical",
            BiasKind::TimeInterval => "time-interval",
            BiasKind::LabelQuality => "label-quality",
            BiasKind::Chronological => "chronological",
            BiasKind::Misclassification => "misclassification",
        }
    }
}

impl std::fmt::Display for BiasKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A detected bias type with pointers to the findings behind it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiasTag {
    pub kind: BiasKind,
    pub evidence: Vec<String>,
}

/// Map audit findings onto the bias taxonomy.
///
/// An incomplete label set indicates label-quality bias rooted in exclusion,
/// possibly caused by too narrow a collection window (time-interval);
/// datapoints whose confident class flips over time indicate chronological
/// bias; mislabeled categories reduce to either cause.
pub fn tag_biases(completeness: &CompletenessResult, flipped_ids: &[String]) -> Vec<BiasTag> {
    let mut tags = Vec::new();
    if !completeness.complete {
        let evidence: Vec<String> = completeness
            .uncovered
            .iter()
            .map(|u| {
                format!(
                    "datapoint {} at time {} needs label {:?}",
                    u.id, u.time, u.needed_label
                )
            })
            .collect();
        for kind in [
            BiasKind::LabelQuality,
            BiasKind::Exclusion,
            BiasKind::TimeInterval,
        ] {
            tags.push(BiasTag {
                kind,
                evidence: evidence.clone(),
            });
        }
    }
    if !flipped_ids.is_empty() {
        tags.push(BiasTag {
            kind: BiasKind::Chronological,
            evidence: flipped_ids
                .iter()
                .map(|id| format!("datapoint {id} changes confident class across snapshots"))
                .collect(),
        });
    }
    if !tags.is_empty() {
        let evidence = tags
            .iter()
            .map(|t| format!("reduces to {}", t.kind))
            .collect();
        tags.push(BiasTag {
            kind: BiasKind::Misclassification,
            evidence,
        });
    }
    tags
}

/// The composite audit outcome: fairness requires completeness and
/// reliability together, as a necessary condition only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditVerdict {
    pub completeness: CompletenessResult,
    pub reliability: ReliabilityResult,
    pub fair: bool,
    pub bias_tags: Vec<BiasTag>,
}

/// Combine the two audits into the fairness verdict. Both must cover the
/// same time frame.
pub fn check_fairness(
    completeness: &CompletenessResult,
    reliability: &ReliabilityResult,
) -> Result<AuditVerdict> {
    if completeness.frame != reliability.frame {
        return Err(AuditError::FrameMismatch {
            detail: "completeness and reliability cover different frames".into(),
        });
    }
    Ok(AuditVerdict {
        completeness: completeness.clone(),
        reliability: reliability.clone(),
        fair: completeness.complete && reliability.reliable,
        bias_tags: Vec::new(),
    })
}

impl AuditVerdict {
    pub fn with_bias_tags(mut self, tags: Vec<BiasTag>) -> Self {
        self.bias_tags = tags;
        self
    }
}

/// Consistency check for a complete label set: classification stays fair at
/// a later time iff the change rate stays below the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub fair: bool,
    pub epsilon: f64,
    pub pi: f64,
}

pub fn theorem1_check(complete_at_t: bool, change: &ChangeRate, pi: f64) -> Result<TheoremVerdict> {
    if !(pi > 0.0 && pi <= 1.0) {
        return Err(AuditError::OutOfRange {
            what: "safety threshold pi".into(),
            value: pi,
        });
    }
    if !complete_at_t {
        return Err(AuditError::HypothesisUnmet {
            detail: "label set is not complete at the base time".into(),
        });
    }
    Ok(TheoremVerdict {
        fair: change.epsilon() < pi,
        epsilon: change.epsilon(),
        pi,
    })
}

/// Whether fairness survives a label-set extension: the base change rate
/// plus the extension cost must not exceed the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionVerdict {
    pub remains_fair: bool,
    /// `pi - epsilon - epsilon_prime`; negative when fairness is lost.
    pub slack: f64,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub pi: f64,
}

pub fn theorem2_check(epsilon: f64, epsilon_prime: f64, pi: f64) -> Result<ExtensionVerdict> {
    if !(pi > 0.0 && pi <= 1.0) {
        return Err(AuditError::OutOfRange {
            what: "safety threshold pi".into(),
            value: pi,
        });
    }
    for (what, value) in [("epsilon", epsilon), ("epsilon_prime", epsilon_prime)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(AuditError::OutOfRange {
                what: what.into(),
                value,
            });
        }
    }
    if epsilon >= pi {
        return Err(AuditError::HypothesisUnmet {
            detail: format!("base change rate {epsilon} already reaches threshold {pi}"),
        });
    }
    Ok(ExtensionVerdict {
        remains_fair: epsilon + epsilon_prime <= pi,
        slack: pi - epsilon - epsilon_prime,
        epsilon,
        epsilon_prime,
        pi,
    })
}
