//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("{path}:{line}: expected {expected} fields, found {found}")]
    FieldCount {
        path: String,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("{path}:{line}: invalid numeric value '{value}' in column '{column}'")]
    InvalidNumber {
        path: String,
        line: usize,
        column: String,
        value: String,
    },
    #[error("{0}: no data rows")]
    EmptyInput(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("variable '{0}' is not categorical")]
    NotCategorical(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("threshold {0} outside [0, 0.5]")]
    ThresholdOutOfRange(f64),
    #[error("matrix must have at least 2 rows, found {0}")]
    TooFewRows(usize),
    #[error("no usable principal components (all directions degenerate)")]
    NoUsableComponents,
    #[error("component {0} has zero variance after projection")]
    ZeroVariance(usize),
    #[error("invalid encoder parameter: {0}")]
    InvalidParam(String),
    #[error("unknown encoding scheme '{0}'")]
    UnknownScheme(String),
    #[error("unknown classifier '{0}'")]
    UnknownClassifier(String),
    #[error("training data contains a single class")]
    SingleClass,
    #[error("non-finite value in feature matrix at row {0}, column {1}")]
    NonFiniteFeature(usize, usize),
    #[error("feature width mismatch: model expects {expected}, input has {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("metric argument {value} outside [{lo}, {hi}]")]
    MetricOutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("harmonic average requires positive inputs, got ({0}, {1})")]
    NonPositiveInput(f64, f64),
    #[error("no records")]
    NoRecords,
    #[error("config error: {0}")]
    Config(String),
    #[error("serialization error: {0}")]
    Serialization(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Wrap an I/O error with the path it concerned.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
