use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("node {0} has degree zero")]
    ZeroDegreeNode(usize),
    #[error("graph has no edges")]
    NoEdges,
    #[error("matrix is numerically singular (condition estimate {0:.3e})")]
    SingularMatrix(f64),
    #[error("series did not converge within {0} terms")]
    SeriesDivergence(usize),
    #[error("spectral radius {0} of the transition matrix is not below one")]
    SpectralRadiusExceeded(f64),
    #[error("kernel contains non-finite entries")]
    NonFinite,
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("label vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("graph generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },
    #[error("degenerate classes: {0}")]
    DegenerateClasses(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("graph {graph} has no record for measure {measure}")]
    MissingMeasure { graph: String, measure: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
