use thiserror::Error;

/// Errors produced by forcing lazy structures.
///
/// Every variant is cheap to clone: a failed cell keeps a copy of its error
/// and replays it on each later force.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A suspension demanded its own value while it was being computed.
    /// The cell id is the one that was re-entered.
    #[error("black hole: cell {cell} depends on its own value")]
    BlackHole { cell: u64 },

    /// head/tail/take demanded an element past the end of a finite stream.
    #[error("empty stream")]
    EmptyStream,

    /// A merge that requires disjoint inputs saw the same value on both
    /// heads. Carries the rendered value for diagnostics.
    #[error("duplicate element in merge: {value}")]
    DuplicateDetected { value: String },

    /// An argument was outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A user-supplied computation failed.
    #[error("computation failed: {0}")]
    Computation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
