use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteInput { row: usize, col: usize },
    #[error("{routine} did not converge after {iterations} iterations")]
    ConvergenceFailure { routine: &'static str, iterations: usize },
    #[error("shape violation: {0}")]
    ShapeViolation(String),
    #[error("index {index} outside {lo}..={hi}")]
    IndexViolation { index: usize, lo: usize, hi: usize },
    #[error("need at least {required} observations, got {got}")]
    InsufficientData { required: usize, got: usize },
    #[error("secular function evaluated at pole d[{index}] = {pole}")]
    PoleEvaluation { index: usize, pole: f64 },
    #[error("invalid rank-one problem: {0}")]
    InvalidProblem(String),
    #[error("column mean is zero; the mean direction is undefined")]
    ZeroMeanInput,
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("test direction is parallel to the mean direction (cos^2 = {0})")]
    DegenerateDirection(f64),
    #[error("{path}: malformed row {row}: {reason}")]
    MalformedInput { path: PathBuf, row: usize, reason: String },
    #[error("{path}: cannot parse {cell:?} at row {row}, column {col}")]
    ParseError { path: PathBuf, row: usize, col: usize, cell: String },
    #[error("{0}: no data rows")]
    EmptyInput(PathBuf),
    #[error("synthetic generation failed after {attempts} attempts: {reason}")]
    GenerationFailure { attempts: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Module that raised the error, used by the CLI when surfacing failures.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidMatrix(_)
            | Error::NonFiniteInput { .. }
            | Error::ShapeViolation(_)
            | Error::IndexViolation { .. } => "linalg",
            Error::ConvergenceFailure { routine, .. } => {
                if routine.starts_with("secular") {
                    "dpr1"
                } else {
                    "linalg"
                }
            }
            Error::InsufficientData { .. } => "pca",
            Error::PoleEvaluation { .. } | Error::InvalidProblem(_) => "dpr1",
            Error::ZeroMeanInput
            | Error::PreconditionViolation(_)
            | Error::InvalidEpsilon(_)
            | Error::DegenerateDirection(_) => "diagnostics",
            Error::MalformedInput { .. } | Error::ParseError { .. } | Error::EmptyInput(_) => {
                "ingest"
            }
            Error::GenerationFailure { .. } => "synthetic",
            Error::Io(_) | Error::Json(_) => "io",
        }
    }
}
