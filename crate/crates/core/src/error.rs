use thiserror::Error;

use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("event at negative time {0}")]
    NegativeEventTime(Rat),
    #[error("event times must be strictly increasing (at {0})")]
    NonIncreasingTimes(Rat),
    #[error("malformed tail: {0}")]
    InvalidTail(String),
    #[error("translation by {d} moves the first switch to {at}, before 0")]
    NotASignal { d: Rat, at: Rat },
    #[error("not a permutation of 0..{0}")]
    BadPermutation(usize),
    #[error("empty projection")]
    EmptyProjection,
    #[error("coordinate {index} out of range for width {width}")]
    CoordinateOutOfRange { index: usize, width: usize },
    #[error("width {0} exceeds the supported maximum")]
    TooWide(usize),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("function depends on dropped input {input} (rows {a} and {b} differ)")]
    DependsOnDroppedInput { input: usize, a: String, b: String },
    #[error("intersection is empty for input {0}")]
    EmptyValue(String),
    #[error("budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("system depends on dropped input {0}")]
    DependenceDetected(usize),
    #[error("periodic tails are not supported here")]
    PeriodicTailUnsupported,
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("{tau} is not strictly between {lo} and {hi}")]
    OutOfInterval { tau: Rat, lo: Rat, hi: Rat },
    #[error("generator does not settle: {0}")]
    NotSettling(String),
    #[error("target {0} is not in the range of F")]
    TargetNotInRange(String),
    #[error("generator function is not constant")]
    NotConstantPhi,
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
