use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the domain")]
    Domain { point: Vec<f64> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid size: {0}")]
    Size(String),

    #[error("degenerate training data: {0}")]
    Degenerate(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("design error: {0}")]
    Design(String),

    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("not enough paired observations for a signed-rank test: {got} < {min}")]
    StatisticalPower { got: usize, min: usize },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("selection error: {0}")]
    Selection(String),

    #[error("shape error: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("training failed: {0}")]
    Training(String),

    #[error("merge error: {0}")]
    Merge(String),

    #[error("unknown function pair `{0}`")]
    UnknownPair(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
