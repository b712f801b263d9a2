use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown indeterminate `{0}`")]
    UnknownVariable(String),
    #[error("no assignment for indeterminate `{0}`")]
    MissingAssignment(String),
    #[error("unknown generator `{0}` for this basis")]
    UnknownGenerator(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("unshuffle block size {p} out of range for {n} factors")]
    UnshuffleRange { p: usize, n: usize },
    #[error("arity cap exceeded: {map} needs a value on a word of length {needed}, known only up to {known}")]
    CapExceeded { map: String, needed: usize, known: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("structure data rejected: {0}")]
    Structure(String),
    #[error("jet order overflow: {0}")]
    OrderOverflow(String),
    #[error("decomposition mismatch: {0}")]
    Decomposition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
