use thiserror::Error;

/// Errors surfaced by the set structures, solvers and instance parser.
#[derive(Debug, Error)]
pub enum Error {
    /// The flattened indicator string would exceed the configured limit.
    #[error("indicator of {needed} bits exceeds the configured limit of {limit} bits")]
    Capacity { needed: u128, limit: u64 },

    /// A sum shift would move a member past the universe bound, which would
    /// silently corrupt the set; the operation is refused instead.
    #[error("shift by {shift} would push a member of the set past the universe bound {universe}")]
    UniverseOverflow { shift: u64, universe: u64 },

    /// Requested total (or total vector) is not achievable by any feasible
    /// schedule of the instance.
    #[error("no feasible schedule attains the requested total {target}")]
    TargetNotAchievable { target: String },

    /// Exhaustive search was refused because the search space is too large.
    #[error("exhaustive search over {space} candidates exceeds the limit of {limit}")]
    SearchSpaceTooLarge { space: u128, limit: u128 },

    /// Instance file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
