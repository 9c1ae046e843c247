//! Error type shared by the coding, classification, and data layers.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset has zero samples")]
    EmptyDataset,

    #[error("no feature columns (header names only a label column)")]
    NoFeatureColumns,

    #[error("header has no `label` column")]
    MissingLabelColumn,

    #[error("duplicate header column `{0}`")]
    DuplicateColumn(String),

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a finite real")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("class `{0}` has no samples")]
    EmptyClass(String),

    #[error("invalid class partition: {0}")]
    BadPartition(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("column {0} has zero norm and cannot be normalized")]
    ZeroNormColumn(usize),

    #[error("query has zero norm and cannot be normalized")]
    ZeroQuery,

    #[error("pca dimension {requested} out of range (maximum {max})")]
    PcaDimension { requested: usize, max: usize },

    #[error("{context}: expected dimension {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("class `{class}` has {have} samples, need {need}")]
    ClassTooSmall {
        class: String,
        have: usize,
        need: usize,
    },

    #[error("{folds} folds exceed the smallest class size {min_class}")]
    TooManyFolds { folds: usize, min_class: usize },

    #[error("factorization failed: matrix is not positive definite")]
    FactorizationFailed,

    #[error("gram cache does not match the solve: {0}")]
    GramMismatch(String),

    #[error("non-finite iterate at iteration {iteration}")]
    NonFiniteIterate { iteration: usize },

    #[error("reference solver exhausted {steps} steps without reaching the step tolerance")]
    OracleExhausted { steps: usize },

    #[error("active-set enumeration supports at most {max} atoms, got {n}")]
    ActiveSetTooLarge { n: usize, max: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown preset `{name}`; available: {}", available.join(", "))]
    UnknownPreset {
        name: String,
        available: Vec<String>,
    },

    #[error("query index {index} out of range (dataset has {len} samples)")]
    QueryIndexOutOfRange { index: usize, len: usize },

    #[error("bad binary header: expected magic `NSCRMAT1`")]
    BadMagic,

    #[error("malformed binary matrix: {0}")]
    BadBinary(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
