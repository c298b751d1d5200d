use alloc::string::String;

/// Errors raised by the decision procedures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// User-supplied data is inconsistent (for example a tile/translation set
    /// that does not yield a Markov matrix).
    #[error("invalid input data: {0}")]
    InputData(String),
    /// A configured enumeration or dimension cap would be exceeded.
    #[error("resource limit exceeded: {what} needs {needed}, cap is {cap}")]
    Resource {
        what: &'static str,
        needed: u128,
        cap: u128,
    },
    /// A computation produced a non-finite intermediate.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// Every product beyond some length vanishes, so growth rates are undefined.
    #[error("degenerate language: every product of length {0} is zero")]
    Degenerate(usize),
    /// An internal consistency check failed. This indicates a bug.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
