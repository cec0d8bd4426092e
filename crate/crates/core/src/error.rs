use thiserror::Error;

/// Errors raised across the graph calculus engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid graph at vertex {vertex}: {reason}")]
    InvalidGraph { vertex: usize, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("resource budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid preset parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported polyvector degrees {0} and {1}")]
    UnsupportedDegree(usize, usize),

    #[error("series is missing order {0}")]
    MissingOrder(usize),

    #[error("order 1 of the series is not normalized to the Poisson class")]
    MissingNormalization,

    #[error("fixture {0} is not a Poisson structure")]
    NotPoisson(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse { position, message: message.into() }
    }

    pub(crate) fn invalid_graph(vertex: usize, reason: impl Into<String>) -> Self {
        Error::InvalidGraph { vertex, reason: reason.into() }
    }

    /// Short machine-readable tag used by error records in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::InvalidGraph { .. } => "invalid_graph",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::ArityMismatch { .. } => "arity_mismatch",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::BudgetExceeded(_) => "budget_exceeded",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UnsupportedDegree(..) => "unsupported_degree",
            Error::MissingOrder(_) => "missing_order",
            Error::MissingNormalization => "missing_normalization",
            Error::NotPoisson(_) => "not_poisson",
        }
    }
}
