use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("format error at {location}: {message}")]
    Format { location: String, message: String },

    #[error("no term reaches the minimum count of {min_count}")]
    EmptyVocabulary { min_count: u64 },

    #[error("non-finite value in input")]
    NonFiniteInput,

    #[error("non-finite loss")]
    NonFiniteLoss,

    #[error("non-finite gradient")]
    NonFiniteGradient,

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("code width {width} exceeds the supported maximum of {max}")]
    WidthOverflow { width: usize, max: usize },

    #[error("code widths differ: {0} vs {1}")]
    WidthMismatch(usize, usize),

    #[error("training diverged at epoch {epoch} (mean loss {loss})")]
    Diverged { epoch: usize, loss: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("unknown query document {0:?}")]
    UnknownQuery(String),

    #[error("document {0:?} has no labels")]
    MissingLabels(String),

    #[error("incompatible model: {0}")]
    IncompatibleModel(String),

    #[error("{} ids missing from one of the inputs (first: {:?})", .0.len(), .0.first())]
    IdMismatch(Vec<String>),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn format(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn shape(expected: usize, got: usize) -> Self {
        Error::ShapeMismatch { expected, got }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
