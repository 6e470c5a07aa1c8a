use alloc::string::String;

/// Errors raised by the reachability core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch { context: &'static str, expected: usize, found: usize },

    #[error("invalid linear program: {0}")]
    InvalidProgram(&'static str),

    /// The simplex iteration stalled or lost feasibility beyond tolerance.
    /// Callers should report an unknown verdict rather than guess.
    #[error("LP solver numerical failure: {0}")]
    NumericalFailure(&'static str),

    #[error("operation requires a nonempty set")]
    EmptySet,

    #[error("range is unbounded in coordinate {0}")]
    Unbounded(usize),

    #[error("predicate variable {0} has an infinite bound")]
    UnboundedPredicate(usize),

    #[error("every member of the set list is empty")]
    AllEmpty,

    #[error("rejection sampling exhausted after {trials} trials ({accepted} accepted)")]
    SamplingExhausted { trials: u64, accepted: u64 },

    #[error("exact reachable set exceeds the star budget of {0}")]
    StarBudgetExceeded(usize),

    #[error("predicate lineage mismatch: {0}")]
    LineageMismatch(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
