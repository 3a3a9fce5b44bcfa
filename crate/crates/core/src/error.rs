use thiserror::Error;

/// Errors raised while reading hypergraph or tree text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header, expected two integers")]
    MalformedHeader { line: usize },
    #[error("line {line}: invalid integer {token:?}")]
    BadToken { line: usize, token: String },
    #[error("line {line}: vertex {vertex} outside [1, {n}]")]
    VertexOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: edge has {found} vertices, expected {expected}")]
    WrongEdgeSize { line: usize, expected: usize, found: usize },
    #[error("line {line}: repeated vertex {vertex} in edge")]
    RepeatedVertex { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge")]
    DuplicateEdge { line: usize },
    #[error("empty input")]
    Empty,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("extraction failed: {0}")]
    ExtractionFailed(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("assembly failed: {0}")]
    AssemblyFailed(String),
    /// A computed object contradicts a proven statement; always a bug.
    #[error("inconsistency: {0}")]
    Inconsistency(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
