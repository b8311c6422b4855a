use thiserror::Error;

/// Errors produced anywhere in the solver pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("derivative of order {requested} not supported (activation supports up to {supported})")]
    UnsupportedDerivative { requested: usize, supported: usize },

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("non-finite value at point {index}: {context}")]
    Numeric { context: String, index: usize },

    #[error("coefficient `{name}` is not positive at point {index} (value {value})")]
    CoefficientViolation { name: String, index: usize, value: f64 },

    #[error("selected element is linearly dependent on the current span: {0}")]
    RankDeficient(String),

    #[error("dictionary search returned no candidate")]
    DegenerateDictionary,

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
