use thiserror::Error;

use crate::nat::Nat;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("0 is not a positive natural number")]
    Zero,

    #[error("1 has no prime factor")]
    Unit,

    #[error("{0} must be composite (neither 1 nor prime)")]
    NotComposite(Nat),

    #[error("window {window} is smaller than element {element}")]
    WindowTooSmall { window: Nat, element: Nat },

    #[error("{value} lies outside the universe {{1..{bound}}}")]
    OutsideUniverse { value: Nat, bound: Nat },

    #[error("filters live on different universes ({left} vs {right})")]
    UniverseMismatch { left: Nat, right: Nat },

    #[error("a filter core must be nonempty")]
    EmptyCore,

    #[error("insufficient primes for label {label}: need {needed}, have {available}")]
    InsufficientPrimes {
        label: String,
        needed: usize,
        available: usize,
    },

    #[error("label {0} has no assigned prime set")]
    UnassignedLabel(String),

    #[error("invalid prime assignment: {0}")]
    InvalidAssignment(String),

    #[error("no witness exists: the first pattern is dominated by the second")]
    NoWitness,

    #[error("the first pattern is not dominated by the second")]
    NotDominated,

    #[error("{0} is not in the generated family")]
    NotInFamily(Nat),

    #[error("{0} is not a product of {1} distinct primes")]
    NotCoprimePower(Nat, usize),

    #[error("a pair needs two distinct elements, got {0} twice")]
    EqualPair(u64),

    #[error("size guard: {what} would need {size}, limit is {limit}")]
    Guard {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
