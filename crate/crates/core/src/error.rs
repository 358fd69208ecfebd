use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("multiplicities {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("need at least 3 cone points, got {0}")]
    TooFewConePoints(usize),
    #[error("multiplicities {{2,3,5}} are excluded (finite orbifold fundamental group)")]
    ExcludedTriple,
    #[error("multiplicity {0} is smaller than 2")]
    BadMultiplicity(i64),
    #[error("expected {expected} residue coefficients, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("divisors live over different signatures")]
    SignatureMismatch,
    #[error("bad matrix shape: d1={d1}, d3={d3} (need d1 >= 0, d3 <= -2)")]
    BadShape { d1: i64, d3: i64 },
    #[error("d2={0} is out of range (need d2 <= -2)")]
    BadDegree(i64),
    #[error("generic extension coefficients not found within {0} candidates")]
    SearchExhausted(usize),
    #[error("search space of {0} residue tuples exceeds the enumeration limit")]
    SearchSpaceTooLarge(u128),
    #[error("integer overflow in divisor arithmetic")]
    Overflow,
    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_error(what: &'static str, input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        what,
        input: input.to_string(),
        reason: reason.into(),
    }
}
