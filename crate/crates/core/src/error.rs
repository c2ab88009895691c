use thiserror::Error;

/// Errors raised by the automaton toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaError {
    #[error("alphabet size {0} is invalid (need 2 <= k <= 36)")]
    InvalidAlphabet(usize),
    #[error("letter {letter} is outside the alphabet of size {k}")]
    LetterOutOfRange { letter: u8, k: usize },
    #[error("wolfram rule number {0} is outside 0..=255")]
    WolframOutOfRange(u32),
    #[error("rule table has {got} entries, expected {expected}")]
    TableSize { expected: usize, got: usize },
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },
    #[error("period mismatch: {left} vs {right}")]
    PeriodMismatch { left: usize, right: usize },
    #[error("invalid interval [{start}, {end})")]
    InvalidInterval { start: i64, end: i64 },
    #[error("interval of length {len} does not fit in period {period}")]
    IntervalTooLong { len: usize, period: usize },
    #[error("period {period} too small: {reason}")]
    PeriodTooSmall { period: usize, reason: String },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("guard exceeded: {what} needs {needed}, limit is {limit}")]
    GuardExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("cannot parse rule: {0}")]
    RuleParse(String),
}

pub type Result<T, E = CaError> = std::result::Result<T, E>;
