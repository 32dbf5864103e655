use thiserror::Error;

/// Errors raised while building instances, hashes, or running protocols.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bit width {0} outside 1..=64")]
    BitWidth(u32),
    #[error("element {value:#x} does not fit in {n} bits")]
    OutOfRange { value: u64, n: u32 },
    #[error("duplicate element {0:#x}")]
    Duplicate(u64),
    #[error("infeasible instance sizes: {0}")]
    InfeasibleSizes(String),
    #[error("value undefined: {0}")]
    Undefined(&'static str),
    #[error("hash width k={k} invalid for n={n}")]
    HashWidth { n: u32, k: u32 },
    #[error("n={n} too large (limit {limit}) for {what}")]
    TooLarge { n: u32, limit: u32, what: &'static str },
    #[error("protocol {protocol} not applicable: {reason}")]
    NotApplicable { protocol: String, reason: String },
    #[error("unknown protocol id `{0}`")]
    UnknownProtocol(String),
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("protocol stalled: neither party sent a message for two turns")]
    Stalled,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
