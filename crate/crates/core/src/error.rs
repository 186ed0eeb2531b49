//! Error type shared across the library.

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Fewer beats than the downstream stage requires.
    #[error("insufficient beats: found {found}, need at least {required}")]
    InsufficientBeats { found: usize, required: usize },

    /// An input that carries no usable signal energy (e.g. an all-zero
    /// time-frequency matrix handed to the ridge extractor).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A malformed annotation record.
    #[error("parse error on line {line}: {reason}")]
    AnnotationParse { line: usize, reason: String },
}
