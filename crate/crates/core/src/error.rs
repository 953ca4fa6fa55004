use thiserror::Error;

/// Errors raised by the counting and verification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured size cap would be exceeded.
    #[error("{what} exceeds the configured cap ({value} > {limit}); {hint}")]
    CapExceeded {
        what: &'static str,
        value: u128,
        limit: u128,
        hint: String,
    },

    /// The set handed to `iota_inverse` is not in the image of the labelling.
    #[error("not a maximum independent set: {0}")]
    NotMaximum(String),

    /// The operation is not defined for these parameters.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Malformed textual input (labels, hex sets, cap overrides).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
