use thiserror::Error;

/// Errors surfaced at module boundaries.
///
/// Inconsistency of a constraint is *not* an error: it is the
/// [`FilterOutcome::Inconsistent`](crate::FilterOutcome::Inconsistent) value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A caller broke the contract of an operation (arity mismatch, pop on an
    /// empty trail, branching before setup, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// An enumeration would have visited more tuples than the configured cap.
    #[error("enumeration cap exceeded: {required} tuples needed, cap is {cap}")]
    ResourceLimit { required: u128, cap: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
