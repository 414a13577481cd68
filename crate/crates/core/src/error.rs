//! Error type shared by all audit operations.

use thiserror::Error;

/// Errors produced by dataset validation, metric computation, and audit
/// predicates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AuditError {
    /// Paired label vectors have different lengths.
    #[error("length mismatch: {predicted} predicted labels vs {actual} actual labels")]
    LengthMismatch { predicted: usize, actual: usize },

    /// A label index does not fit the partition.
    #[error("label index {index} out of range for {classes} classes")]
    IndexOutOfRange { index: usize, classes: usize },

    /// A confusion matrix with no observations has no rates.
    #[error("confusion matrix is empty")]
    EmptyMatrix,

    /// A conditional rate was requested against an empty marginal.
    #[error("zero marginal for class {class} ({side})")]
    ZeroMarginal { class: usize, side: &'static str },

    /// The wrong-label and correct-label arguments coincide.
    #[error("wrong and correct label are both {label}; pair rates need distinct labels")]
    SameLabel { label: usize },

    /// Two matrices or partitions are not commensurable.
    #[error("shape mismatch: {detail}")]
    ShapeMismatch { detail: String },

    /// Threshold vector does not match the snapshot's class count.
    #[error("threshold vector covers {got} classes, snapshot has {expected}")]
    ThresholdMismatch { got: usize, expected: usize },

    /// A temporal operation needs more snapshots than the series holds.
    #[error("series has {len} snapshots, operation needs at least {min}")]
    SeriesTooShort { len: usize, min: usize },

    /// No ground-truth label is available for a datapoint at a time.
    #[error("missing truth for datapoint {id} at time {time}")]
    MissingTruth { id: String, time: i64 },

    /// A rate or threshold argument lies outside its admissible range.
    #[error("{what} = {value} is out of range")]
    OutOfRange { what: String, value: f64 },

    /// Two results were combined across different time frames.
    #[error("time frame mismatch: {detail}")]
    FrameMismatch { detail: String },

    /// A theorem check was invoked with its hypothesis violated.
    #[error("hypothesis unmet: {detail}")]
    HypothesisUnmet { detail: String },

    /// A generator configuration is unusable.
    #[error("invalid config: {detail}")]
    InvalidConfig { detail: String },

    /// A constructor rejected its inputs; the detail names the invariant.
    #[error("invariant violated: {detail}")]
    InvariantViolation { detail: String },

    /// Every row of the confident joint is empty, so no joint estimate exists.
    #[error("confident joint has no assigned datapoints; joint estimate undefined")]
    EmptyJoint,
}

pub type Result<T> = std::result::Result<T, AuditError>;
