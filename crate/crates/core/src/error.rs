use thiserror::Error;

/// Errors produced by dataset ingestion, noise injection and set enumeration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found or unreadable: {0}")]
    MissingFile(String),

    #[error("empty file: {0}")]
    EmptyFile(String),

    #[error("non-numeric feature cell at row {row}, column {column}: {value:?}")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("label column {column:?} has {found} distinct values, expected exactly 2")]
    LabelCardinality { column: String, found: usize },

    #[error("column {0:?} not present in header")]
    MissingColumn(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("parameter {name} = {value} outside valid range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("fold count {folds} exceeds sample count {n}")]
    FoldCount { folds: usize, n: usize },

    #[error("operation requires binary features")]
    NonBinaryData,

    #[error("prediction vector must be in {{0,1}}")]
    NonBinaryPrediction,

    #[error(
        "tree depth {depth} exceeds feature count {m}: no path-distinct feature assignment exists"
    )]
    DepthExceedsFeatures { depth: usize, m: usize },

    #[error("depth cap must be at least 1")]
    DepthCapTooSmall,

    #[error("pattern collection requested but rashomon count {count} exceeds cap {cap}")]
    PatternCapExceeded { count: u128, cap: u128 },

    #[error("sample count {n} exceeds configured branch-and-bound cap {cap}")]
    SampleCapExceeded { n: usize, cap: usize },

    #[error("margin shift requires the negative-class mean at the origin")]
    MarginShiftOffOrigin,

    #[error("empty pattern set")]
    EmptyPatternSet,

    #[error("pattern weights must sum to 1 (got {0})")]
    WeightSum(f64),

    #[error("noise spec invalid: {0}")]
    NoiseSpec(String),

    #[error("model/generator mismatch: {0}")]
    ModelMismatch(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
