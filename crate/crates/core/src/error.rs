use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("cannot embed a value of arity {arity} at offset {offset} into arity {target}")]
    InvalidEmbedding {
        arity: usize,
        offset: usize,
        target: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is tropically singular (permanent is bottom)")]
    Singular,

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("exhaustive check refused: {0}")]
    SizeGuard(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("pivot on row {leaving} found no adjacent basis")]
    NoPivotCandidate { leaving: usize },

    #[error("pivot on row {leaving} found {count} adjacent bases")]
    MultiplePivotCandidates { leaving: usize, count: usize },

    #[error("simplex exceeded the iteration cap of {0}")]
    IterationCap(usize),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by bad input rather than a broken solver invariant.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::ArityMismatch { .. }
                | Error::InvalidEmbedding { .. }
                | Error::DimensionMismatch(_)
                | Error::SizeGuard(_)
                | Error::InvalidGame(_)
                | Error::Parse(_)
        )
    }
}
