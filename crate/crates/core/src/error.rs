use thiserror::Error;

use crate::dataset::CaseId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("csv input has no header row")]
    MissingHeader,

    #[error("label column `{0}` not found in header")]
    MissingLabelColumn(String),

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a finite number")]
    NonNumeric { row: usize, column: String, value: String },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("unknown case id {0}")]
    UnknownCaseId(CaseId),

    #[error("duplicate case id {0}")]
    DuplicateCaseId(CaseId),

    #[error("no score supplied for case id {0}")]
    MissingScore(CaseId),

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("invalid feature expression: {0}")]
    InvalidFeature(String),

    #[error("within-class scatter is singular over attributes [{}]", attributes.join(", "))]
    SingularScatter { attributes: Vec<String> },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("class `{class}` needs at least {needed} cases, found {found}")]
    TooFewCases { class: String, needed: usize, found: usize },

    #[error("the case set contains a single class; nothing to separate")]
    SingleClass,

    #[error("misclassified set is empty")]
    EmptyMisclassified,

    #[error("weights must satisfy w1 >= w2 > 0, got w1 = {w1}, w2 = {w2}")]
    InvalidWeights { w1: f64, w2: f64 },

    #[error("inconsistent intervals: {0}")]
    InconsistentIntervals(String),

    #[error("rectangle is not pure for `{label}`: offending case ids {offending:?}")]
    ImpureRectangle { label: String, offending: Vec<CaseId> },

    #[error("stale revision: session is at {current}, request was based on {requested}")]
    StaleRevision { current: u64, requested: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
