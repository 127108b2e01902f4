//! One error type for the whole crate; variants say which contract broke.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("digit word must contain at least one digit")]
    EmptyWord,
    #[error("digit {digit} at position {index} is not below radix {radix}")]
    DigitOutOfRange {
        index: usize,
        digit: u32,
        radix: u32,
    },
    #[error("radix {radix} at position {index} is smaller than 2")]
    RadixTooSmall { index: usize, radix: u32 },
    #[error("got {digits} digits but {radices} radices")]
    LengthMismatch { digits: usize, radices: usize },
    #[error("{context} requires a dyadic (all-radix-2) word")]
    NonDyadic { context: &'static str },
    #[error("cannot parse digit word {input:?}")]
    WordParse { input: String },
    #[error("cannot parse rational {input:?}")]
    RatioParse { input: String },
    #[error("bernoulli parameter must lie strictly between 0 and 1, got {p}")]
    InvalidProbability { p: String },
    #[error("window of length {len} exceeds the supported maximum {max}")]
    WindowTooLong { len: usize, max: usize },
    #[error("window of length {len} is below the minimum {min}")]
    WindowTooShort { len: usize, min: usize },
    #[error("iteration budget of {budget} steps exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("zero count {zeros} exceeds word length {len}")]
    BadComposition { zeros: usize, len: usize },
    #[error("rank {rank} out of range for a composition class of size {size}")]
    RankOutOfRange { rank: String, size: String },
    #[error("normalization ladder has no entry for n = {n}")]
    MissingLadderEntry { n: usize },
    #[error("normalization scale must be positive, got {b}")]
    DegenerateScale { b: String },
    #[error("sample count must be positive")]
    ZeroSamples,
    #[error("takagi argument must lie in [0, 1], got {t}")]
    TakagiDomain { t: String },

    #[error("tower level {level} exceeds ceiling {ceiling}")]
    LevelAboveCeiling { level: u64, ceiling: u64 },
    #[error("first return must start at level 0, got level {level}")]
    NotAtBase { level: u64 },

    #[error("return set must contain at least one cylinder")]
    EmptyBase,
    #[error("return-set cylinders must share one prefix length")]
    MixedBaseLengths,
    #[error("prefix length {prefix} exceeds window length {len}")]
    PrefixTooLong { prefix: usize, len: usize },

    #[error("graded graph is malformed: {reason}")]
    MalformedGraph { reason: String },
    #[error("malformed path: {reason}")]
    MalformedPath { reason: String },
    #[error("out-degree {observed} exceeds odometer radix {radix}")]
    OutDegreeExceeded { observed: usize, radix: u32 },
    #[error("expected a single root vertex, found {roots}")]
    MultipleRoots { roots: usize },

    #[error("group element is invalid: {reason}")]
    InvalidElement { reason: String },
    #[error("step distribution is invalid: {reason}")]
    InvalidDistribution { reason: String },
    #[error("unknown generator {token:?}")]
    UnknownGenerator { token: String },
    #[error("trajectory is invalid: {reason}")]
    InvalidTrajectory { reason: String },
    #[error("ball of size {size} exceeds the cap {cap}")]
    BallTooLarge { size: usize, cap: usize },
}
