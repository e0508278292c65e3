use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed token {0:?}")]
    MalformedToken(String),
    #[error("duplicate value {0}")]
    DuplicateValue(u32),
    #[error("value {value} out of range 1..={len}")]
    ValueOutOfRange { value: u32, len: usize },
    #[error("permutation of length {0} is too long (max 255)")]
    TooLong(usize),
    #[error("compact form needs length <= 9, got {0}")]
    CompactTooLong(usize),

    #[error("malformed rule {0:?}")]
    MalformedRule(String),
    #[error("{0:?} is not one of the 18 two-integer star patterns")]
    IllegalBeta(String),

    #[error("({0}, {1}, {2}) is not a copy of 123")]
    InvalidSite(usize, usize, usize),
    #[error("illegal backward move: {0}")]
    IllegalMove(String),

    #[error("triple (m={m}, p={p}, v={v}) is not realized by any permutation")]
    Unrealizable { m: usize, p: usize, v: usize },
    #[error("rule category {0} does not support this operation")]
    WrongCategory(&'static str),

    #[error("length bound {0} exceeds the search guard of {1}")]
    GuardExceeded(usize, usize),
    #[error("no identity reached with slack {slack} (ceiling {ceiling})")]
    NotReached { slack: usize, ceiling: usize },
    #[error("certificate step {step}: {reason}")]
    Replay { step: usize, reason: String },

    #[error("bad partition document: {0}")]
    BadDocument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
