use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("non-numeric cell at row {row}, column {column}: `{value}`")]
    Cell {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("unsupported attribute `{name}` of type `{kind}` at line {line}")]
    UnsupportedAttribute {
        name: String,
        kind: String,
        line: usize,
    },

    #[error("dataset has no usable rows ({dropped} rows dropped for missing values)")]
    EmptyDataset { dropped: usize },

    #[error("dataset has no feature columns")]
    NoFeatures,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown learner key `{0}`")]
    UnknownLearner(String),

    #[error("unknown method key `{0}`")]
    UnknownMethod(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("all weights are zero")]
    DegenerateWeights,

    #[error("degenerate particle cloud: {0}")]
    DegenerateCloud(String),

    #[error("non-finite prediction at chain stage {stage} (target column {target})")]
    NonFinitePrediction { stage: usize, target: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
