use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex: {0}")]
    UnknownVertex(String),
    #[error("a vertex cannot dominate itself ({0})")]
    SelfDomination(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid family spec `{spec}`: {reason}")]
    InvalidSpec { spec: String, reason: String },
    #[error("family `{0}` is infinite; give a truncation parameter to get a finite graph")]
    InfiniteFamily(String),
    #[error("vertex budget of {0} exceeded")]
    Budget(usize),
    #[error("graph has {got} vertices, the limit for this operation is {limit}")]
    TooLarge { got: usize, limit: usize },
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("oracle does not support {0}")]
    Unsupported(&'static str),
    #[error("strategy `{name}` failed: {reason}")]
    Strategy { name: String, reason: String },
    #[error("malformed transcript: {0}")]
    Transcript(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
