use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    TooFewObservations {
        needed: usize,
        got: usize,
    },
    /// A revenue used as a return denominator is zero.
    ZeroDenominator {
        index: usize,
    },
    NegativeRevenue {
        index: usize,
    },
    NonFiniteValue {
        index: usize,
    },
    /// Dates must be strictly increasing.
    UnorderedDates {
        index: usize,
    },
    InvalidDate,
    InvalidRange,
    OverlappingRanges {
        first: usize,
        second: usize,
    },
    EmptyPeriod {
        index: usize,
    },
    InvalidParams,
    InvalidProbability(f64),
    InvalidCounts,
    TooFewExceedances {
        needed: usize,
        got: usize,
    },
    NonConvergence {
        iterations: usize,
    },
    DegenerateSample,
    EmptySample,
    Unsorted,
    BoundaryValue {
        index: usize,
    },
    NoExceedances,
    ShapeAtOrAboveOne,
    NoSurvivingCandidates,
    NotApplicable,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TooFewObservations { needed, got } => {
                write!(f, "too few observations: need at least {needed}, got {got}")
            }
            Error::ZeroDenominator { index } => write!(f, "zero revenue at observation {index} cannot be a return base"),
            Error::NegativeRevenue { index } => write!(f, "negative revenue at observation {index}"),
            Error::NonFiniteValue { index } => write!(f, "non-finite value at position {index}"),
            Error::UnorderedDates { index } => write!(f, "dates not strictly increasing at observation {index}"),
            Error::InvalidDate => f.write_str("invalid calendar date"),
            Error::InvalidRange => f.write_str("date range start must precede its end"),
            Error::OverlappingRanges { first, second } => write!(f, "date ranges {first} and {second} overlap"),
            Error::EmptyPeriod { index } => write!(f, "period {index} contains no returns"),
            Error::InvalidParams => f.write_str("invalid GPD parameters (scale must be positive, both finite)"),
            Error::InvalidProbability(p) => write!(f, "probability {p} outside its allowed range"),
            Error::InvalidCounts => f.write_str("invalid counts: need 0 < n_u <= n"),
            Error::TooFewExceedances { needed, got } => {
                write!(f, "too few exceedances to fit: need at least {needed}, got {got}")
            }
            Error::NonConvergence { iterations } => write!(f, "likelihood maximisation did not converge after {iterations} iterations"),
            Error::DegenerateSample => f.write_str("all excesses are equal"),
            Error::EmptySample => f.write_str("empty sample"),
            Error::Unsorted => f.write_str("values must be sorted ascending"),
            Error::BoundaryValue { index } => write!(f, "probability at position {index} is outside [0, 1]"),
            Error::NoExceedances => f.write_str("no observation exceeds the threshold"),
            Error::ShapeAtOrAboveOne => f.write_str("expected shortfall diverges for shape >= 1"),
            Error::NoSurvivingCandidates => f.write_str("no candidate threshold survived the filters"),
            Error::NotApplicable => f.write_str("goodness-of-fit verdicts are not available for this tail"),
        }
    }
}

impl core::error::Error for Error {}
