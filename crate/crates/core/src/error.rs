use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed textual input (polynomials, values, residual polynomials).
    #[error("parse error: {0}")]
    Parse(String),
    /// A chain or continuous family violates one of its structural invariants.
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    /// An operation's mathematical precondition does not hold.
    #[error("domain error: {0}")]
    Domain(String),
    /// A computation would exceed a configured cap or needs a longer chain prefix.
    #[error("resource error: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
