//! Synthetic timestamped datasets with controlled drift, labeler noise, and
//! optional ontology switching. Fixed seeds reproduce output bit for bit,
//! which makes the generator usable as a ground-truth source in tests.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};
use crate::fairness::LabelSetManifest;
use crate::label::{LabelPartition, TimeFrame};
use crate::snapshot::{Annotations, Snapshot};
use crate::temporal::SnapshotSeries;

/// Parameters for one generated series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftConfig {
    pub n_datapoints: usize,
    pub n_classes: usize,
    /// Number of snapshots; times run 0..n_timestamps.
    pub n_timestamps: usize,
    /// Per-step probability that a datapoint's true label flips.
    pub drift_rate: f64,
    /// Probability that the recorded noisy label differs from the true one.
    pub noise_rate: f64,
    /// Weight of the one-hot component in each probability row: 1 produces
    /// exact one-hot rows, 0 produces uniform rows.
    pub sharpness: f64,
    /// When set, a label outside the classifier's vocabulary enters the
    /// ontology at this time: the manifest grows, and truth may drift into
    /// the new label from then on.
    #[serde(default)]
    pub new_label_time: Option<i64>,
    /// When true the labeler re-annotates every snapshot, so noisy labels
    /// track the current truth. When false (the default) each datapoint is
    /// labeled once at the first timestamp and the recorded label goes
    /// stale as the truth drifts, which is what erodes accuracy over the
    /// frame.
    #[serde(default)]
    pub relabel_each_step: bool,
    pub seed: u64,
    /// Class names; defaults to c0..c{m-1}.
    #[serde(default)]
    pub class_names: Option<Vec<String>>,
    /// Name of the ontology-switching label; defaults to "emergent".
    #[serde(default)]
    pub new_label_name: Option<String>,
}

impl DriftConfig {
    /// Named scenarios: a static population next to a fast-moving one.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "midwest-1950" => Some(Self {
                n_datapoints: 200,
                n_classes: 2,
                n_timestamps: 4,
                drift_rate: 0.0,
                noise_rate: 0.02,
                sharpness: 0.9,
                new_label_time: None,
                relabel_each_step: false,
                seed: 1950,
                class_names: Some(vec!["male".into(), "female".into()]),
                new_label_name: None,
            }),
            "berlin-1990" => Some(Self {
                n_datapoints: 200,
                n_classes: 2,
                n_timestamps: 4,
                drift_rate: 0.1,
                noise_rate: 0.02,
                sharpness: 0.9,
                new_label_time: Some(2),
                relabel_each_step: false,
                seed: 1990,
                class_names: Some(vec!["male".into(), "female".into()]),
                new_label_name: Some("nonbinary".into()),
            }),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_datapoints == 0 {
            return Err(AuditError::InvalidConfig {
                detail: "n_datapoints must be positive".into(),
            });
        }
        if self.n_classes < 2 {
            return Err(AuditError::InvalidConfig {
                detail: format!("need at least 2 classes, got {}", self.n_classes),
            });
        }
        if self.n_timestamps < 2 {
            return Err(AuditError::InvalidConfig {
                detail: format!("need at least 2 timestamps, got {}", self.n_timestamps),
            });
        }
        for (what, value) in [
            ("drift_rate", self.drift_rate),
            ("noise_rate", self.noise_rate),
            ("sharpness", self.sharpness),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(AuditError::InvalidConfig {
                    detail: format!("{what} = {value} outside [0, 1]"),
                });
            }
        }
        if let Some(t) = self.new_label_time {
            if t < 0 || t >= self.n_timestamps as i64 {
                return Err(AuditError::InvalidConfig {
                    detail: format!("new_label_time {t} outside frame 0..{}", self.n_timestamps),
                });
            }
        }
        if let Some(names) = &self.class_names {
            if names.len() != self.n_classes {
                return Err(AuditError::InvalidConfig {
                    detail: format!("{} class names for {} classes", names.len(), self.n_classes),
                });
            }
        }
        Ok(())
    }

    fn names(&self) -> Vec<String> {
        self.class_names
            .clone()
            .unwrap_or_else(|| (0..self.n_classes).map(|j| format!("c{j}")).collect())
    }

    fn new_name(&self) -> String {
        self.new_label_name
            .clone()
            .unwrap_or_else(|| "emergent".into())
    }
}

/// A generated series with its ground truth and declared label sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub series: SnapshotSeries,
    pub truth: Annotations,
    pub manifest: LabelSetManifest,
}

/// Flip to a uniformly chosen class other than `current` among `universe`
/// classes.
fn flip_away<R: Rng>(rng: &mut R, current: usize, universe: usize) -> usize {
    let pick = rng.gen_range(0..universe - 1);
    if pick >= current {
        pick + 1
    } else {
        pick
    }
}

/// Generate a snapshot series under the configured drift process.
///
/// True labels evolve by per-step uniform flips at the drift rate; noisy
/// labels corrupt the true label class-conditionally at the noise rate,
/// either once at the first timestamp (stale labels, the default) or at
/// every snapshot (`relabel_each_step`); probability rows mix a one-hot
/// peak on the current true label with the uniform distribution, weighted
/// by sharpness. Datapoints whose true label has left the classifier's
/// vocabulary get uniform rows and a uniformly random noisy label on
/// relabeling, and the embedded true-label column is dropped for the whole
/// series (annotations still carry every truth).
pub fn generate(config: &DriftConfig) -> Result<Generated> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let m = config.n_classes;
    let n = config.n_datapoints;
    let names = config.names();
    let new_name = config.new_name();
    // index m stands for the out-of-vocabulary label
    let label_name = |label: usize| -> &str {
        if label < m {
            &names[label]
        } else {
            &new_name
        }
    };

    let ids: Vec<String> = (0..n).map(|k| format!("d{k}")).collect();
    let mut true_labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();

    let timestamps: Vec<i64> = (0..config.n_timestamps as i64).collect();
    let mut snapshots = Vec::with_capacity(timestamps.len());
    let mut truth = Annotations::new();
    let mut partitions = BTreeMap::new();
    let embed_truth = config.new_label_time.is_none();

    let label_once = |rng: &mut ChaCha8Rng, label: usize| -> usize {
        if label < m {
            if rng.gen_bool(config.noise_rate) {
                flip_away(rng, label, m)
            } else {
                label
            }
        } else {
            // the labeler has no word for the new identity
            rng.gen_range(0..m)
        }
    };
    let mut recorded: Vec<usize> = Vec::new();

    for &t in &timestamps {
        let new_label_active = config.new_label_time.is_some_and(|intro| t >= intro);
        if t > 0 {
            let universe = if new_label_active { m + 1 } else { m };
            for label in true_labels.iter_mut() {
                if rng.gen_bool(config.drift_rate) {
                    *label = flip_away(&mut rng, *label, universe);
                }
            }
        }

        if t == 0 || config.relabel_each_step {
            recorded = true_labels
                .iter()
                .map(|&label| label_once(&mut rng, label))
                .collect();
        }
        let noisy = recorded.clone();

        let uniform = 1.0 / m as f64;
        let rows: Vec<Vec<f64>> = true_labels
            .iter()
            .map(|&label| {
                (0..m)
                    .map(|j| {
                        if label < m {
                            let peak = if j == label { config.sharpness } else { 0.0 };
                            peak + (1.0 - config.sharpness) * uniform
                        } else {
                            uniform
                        }
                    })
                    .collect()
            })
            .collect();

        for (id, &label) in ids.iter().zip(&true_labels) {
            truth.insert(id.clone(), t, label_name(label));
        }

        let partition = LabelPartition::new(names.clone(), t)?;
        snapshots.push(Snapshot::new(
            t,
            partition,
            ids.clone(),
            noisy,
            rows,
            embed_truth.then(|| true_labels.clone()),
        )?);

        let mut manifest_names = names.clone();
        if new_label_active {
            manifest_names.push(new_name.clone());
        }
        partitions.insert(t, LabelPartition::new(manifest_names, t)?);
    }

    let frame = TimeFrame::new(timestamps)?;
    let manifest = LabelSetManifest::new(partitions, &frame)?;
    let series = SnapshotSeries::new(frame, snapshots)?;
    Ok(Generated {
        series,
        truth,
        manifest,
    })
}
