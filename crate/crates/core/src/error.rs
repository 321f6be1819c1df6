use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {what} (diagnostic {diagnostic:e})")]
    NumericalFailure { what: String, diagnostic: f64 },

    #[error("eigenvalue {index} lies in a degenerate cluster; use the confluent path")]
    DegenerateSpectrum { index: usize },

    #[error("unsupported order {order}: {context}")]
    UnsupportedOrder { order: usize, context: String },

    #[error("s = {s} is within tolerance of a pole of the resolvent (|det(I - sM)| = {det_abs:e})")]
    PoleProximity { s: String, det_abs: f64 },

    #[error("inconsistent invariants: {0}")]
    InconsistentInvariants(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn numerical(what: impl Into<String>, diagnostic: f64) -> Self {
        Error::NumericalFailure {
            what: what.into(),
            diagnostic,
        }
    }

    pub(crate) fn unsupported(order: usize, context: impl Into<String>) -> Self {
        Error::UnsupportedOrder {
            order,
            context: context.into(),
        }
    }

    /// Whether this error stems from the caller's input rather than from
    /// the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::UnsupportedOrder { .. } | Error::InconsistentInvariants(_)
        )
    }
}
