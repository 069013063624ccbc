use thiserror::Error;

/// Errors raised by the workbench operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("index {index} out of range for universe of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("copy {0:?} is not a copy of the required structure")]
    NotACopy(Vec<usize>),
    #[error("unbound variable x{0}")]
    UnboundVariable(usize),
    #[error("color atom evaluated without a color oracle")]
    MissingColorOracle,
    #[error("class enumerator exhausted before a witness was found")]
    EnumeratorExhausted,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("nodes are comparable under the prefix order")]
    ComparableNodes,
    #[error("empty tree set")]
    EmptyTreeSet,
    #[error("tree set is not an antichain")]
    NotAnAntichain,
    #[error("tree set is not closed under meets")]
    NotMeetClosed,
    #[error("insufficient depth: {0}")]
    InsufficientDepth(String),
    #[error("tangent number index must be odd, got {0}")]
    EvenTangentIndex(u32),
    #[error("arithmetic overflow computing {0}")]
    Overflow(String),
    #[error("horizon {horizon} is below the explicit prefix length {prefix}")]
    HorizonBelowPrefix { horizon: usize, prefix: usize },
    #[error("copy is certified undefined on a cofinite set")]
    CopyUndefined,
    #[error("sequence is not trending: {0}")]
    NotTrending(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
