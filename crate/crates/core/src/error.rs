use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CastError> = std::result::Result<T, E>;

/// A single problem found while validating raw grouped p-value records.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyInput,
    EmptyFeatureId { index: usize },
    EmptyGroupId { feature: String },
    DuplicateFeature(String),
    PValueOutOfRange { feature: String, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyInput => write!(f, "empty input"),
            Violation::EmptyFeatureId { index } => write!(f, "record {index} has an empty feature id"),
            Violation::EmptyGroupId { feature } => write!(f, "feature {feature} has an empty group id"),
            Violation::DuplicateFeature(id) => write!(f, "duplicate feature {id}"),
            Violation::PValueOutOfRange { feature, value } => {
                write!(f, "p-value {value} of feature {feature} outside [0, 1]")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum CastError {
    #[error("invalid grouped p-values: {}", join(.0))]
    Validation(Vec<Violation>),

    #[error("empty input")]
    EmptyInput,

    #[error("p-values are not sorted ascending at position {position}")]
    UnsortedInput { position: usize },

    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("clamp delta must lie in (0, 0.01], got {0}")]
    InvalidDelta(f64),

    #[error("correlation factor needs the harmonic fallback at rank {rank}")]
    FallbackRequired { rank: usize },

    #[error("no correlations supplied for group {0}")]
    MissingCorrelation(String),

    #[error("correlation input for group {group} is invalid: {reason}")]
    InvalidCorrelation { group: String, reason: String },

    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("row {row}: {source}")]
    Row {
        row: String,
        #[source]
        source: Box<CastError>,
    },

    #[error("cannot split {features} features into {groups} non-empty groups")]
    InfeasiblePartition { groups: usize, features: usize },

    #[error("infeasible signal counts: {0}")]
    InfeasibleSignalCounts(String),

    #[error("connected component of {size} features exceeds the dense cap of {cap}")]
    ComponentTooLarge { size: usize, cap: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("inconsistent counts: {0}")]
    CountInconsistency(String),

    #[error("need at least 2 replicates, got {0}")]
    TooFewReplicates(usize),

    #[error("{path}:{line}: column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: String,
        message: String,
    },

    #[error("subject mismatch: {0}")]
    SubjectMismatch(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CastError {
    /// Stable machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            CastError::Validation(_) => "validation",
            CastError::EmptyInput => "empty_input",
            CastError::UnsortedInput { .. } => "unsorted_input",
            CastError::InvalidAlpha(_) => "invalid_alpha",
            CastError::InvalidDelta(_) => "invalid_delta",
            CastError::FallbackRequired { .. } => "fallback_required",
            CastError::MissingCorrelation(_) => "missing_correlation",
            CastError::InvalidCorrelation { .. } => "invalid_correlation",
            CastError::TooFewObservations { .. } => "too_few_observations",
            CastError::Row { source, .. } => source.kind(),
            CastError::InfeasiblePartition { .. } => "infeasible_partition",
            CastError::InfeasibleSignalCounts(_) => "infeasible_signal_counts",
            CastError::ComponentTooLarge { .. } => "component_too_large",
            CastError::InvalidScenario(_) => "invalid_scenario",
            CastError::CountInconsistency(_) => "count_inconsistency",
            CastError::TooFewReplicates(_) => "too_few_replicates",
            CastError::Parse { .. } => "parse_error",
            CastError::SubjectMismatch(_) => "subject_mismatch",
            CastError::Config(_) => "config",
            CastError::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CastError::Io { path: path.into(), source }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
