use thiserror::Error;

#[derive(Debug, Error)]
pub enum MbfError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what}: n = {n} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("no fixpoint after {iterations} oracle iterations")]
    NonConvergence { iterations: usize },

    #[error("malformed LE list for node {node}: {reason}")]
    MalformedList { node: usize, reason: String },

    #[error("unknown node {0}")]
    UnknownNode(usize),

    #[error("missing trace: {0}")]
    MissingTrace(String),

    #[error("tree is not hierarchical: {0}")]
    NotHierarchical(String),
}

pub type Result<T> = std::result::Result<T, MbfError>;
