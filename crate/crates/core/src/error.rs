use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("graph contains a cycle through `{0}`")]
    Cycle(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{variable}`: {reason}")]
    InvalidVariable { variable: String, reason: String },
    #[error("unknown state `{state}` for variable `{variable}`")]
    UnknownState { variable: String, state: String },
    #[error("state index {index} out of range for `{variable}` ({cardinality} states)")]
    StateOutOfRange {
        variable: String,
        index: usize,
        cardinality: usize,
    },
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("CPT for `{variable}`: {reason}")]
    InvalidCpt { variable: String, reason: String },
    #[error("assignment is missing variable `{0}`")]
    IncompleteAssignment(String),
    #[error("evidence has zero probability under the network")]
    ZeroProbabilityEvidence,
    #[error("target `{0}` is also part of the evidence")]
    TargetInEvidence(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("no legal perturbation of the DAG exists ({0})")]
    NoLegalPerturbation(String),
    #[error("query {index}: {source}")]
    Query {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("run {run}: {source}")]
    Run {
        run: String,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
