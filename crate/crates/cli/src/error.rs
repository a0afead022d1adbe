use std::path::PathBuf;

use boxtail_core::Error as CoreError;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{}: line {line}: {message}", path.display())]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{context}: {source}")]
    Pipeline { context: String, source: CoreError },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    /// 2 for anything the caller can fix in their input or flags, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Read { .. } | CliError::Parse { .. } => 2,
            CliError::Pipeline { source, .. } if is_input_error(source) => 2,
            _ => 1,
        }
    }

    pub fn pipeline(context: impl Into<String>) -> impl FnOnce(CoreError) -> CliError {
        let context = context.into();
        move |source| CliError::Pipeline { context, source }
    }
}

fn is_input_error(e: &CoreError) -> bool {
    use CoreError::*;
    matches!(
        e,
        TooFewObservations { .. }
            | ZeroDenominator { .. }
            | NegativeRevenue { .. }
            | NonFiniteValue { .. }
            | UnorderedDates { .. }
            | InvalidDate
            | InvalidRange
            | OverlappingRanges { .. }
            | EmptyPeriod { .. }
            | InvalidParams
            | InvalidProbability(_)
            | InvalidCounts
            | EmptySample
            | TooFewExceedances { .. }
            | NoExceedances
            | NoSurvivingCandidates
            | NotApplicable
    )
}
