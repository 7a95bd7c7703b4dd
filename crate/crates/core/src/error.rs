use crate::matching::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("alphabet size {size} exceeds the configured limit of {limit}")]
    AlphabetTooLarge { size: u128, limit: usize },

    #[error("alphabet mismatch: {left} symbols vs {right} symbols")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("not a channel: {0}")]
    NotStochastic(String),

    #[error("invalid distance matrix: {0}")]
    InvalidDistance(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("channel is not reasonable: Pr({received}|{received}) <= Pr({received}|{sent})")]
    Unreasonable { received: usize, sent: usize },

    #[error("code enumeration needs {needed} decoder comparisons, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("construction failed verification at length {length}: {violation}")]
    Construction { length: usize, violation: Box<Violation> },

    #[error("construction invariant broken: {0}")]
    Invariant(String),

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
