use thiserror::Error;

/// Crate-wide error type. Variants carry enough context to name the
/// offending input (field, page, byte offset) in the message.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed dump stream at byte offset {offset}: {reason}")]
    MalformedStream { offset: u64, reason: String },

    #[error("empty subject index for {0}")]
    EmptySubjectIndex(String),

    #[error("page {0} has no laureates table")]
    NoLaureatesTable(String),

    #[error("corpus error: {0}")]
    Corpus(String),

    #[error("network schema violation: {0}")]
    Schema(String),

    #[error("graph error: {0}")]
    Graph(String),

    #[error("{0}")]
    Stats(String),

    #[error("modularity undefined: network has no edges")]
    ModularityUndefined,

    #[error("core-periphery undefined: network has no edges")]
    CorePeripheryUndefined,

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("regression undefined: fewer than 2 distinct year differences")]
    RegressionUndefined,

    #[error("empty initial subgraph: no node predates year {0}; try a later start year")]
    EmptyInitialSubgraph(i64),

    #[error("power iteration did not converge within {iterations} iterations (residual {residual:e})")]
    PowerIterationDiverged { iterations: usize, residual: f64 },

    #[error("changepoint signal too short: length {len}, need at least {min}")]
    SignalTooShort { len: usize, min: usize },

    #[error("no Nobel titles matched the union network")]
    EmptyNobelIntersection,

    #[error("empty complement: every union node is a Nobel node")]
    EmptyNobelComplement,

    #[error("parameter {name} out of range: {value} (allowed {bound})")]
    ParamOutOfRange {
        name: String,
        value: String,
        bound: String,
    },

    #[error("missing upstream artifact {path}; run `{subcommand}` first")]
    MissingArtifact { path: String, subcommand: String },
}

pub type Result<T> = std::result::Result<T, Error>;
