use thiserror::Error;

use crate::audit::OracleError;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("instance has {found} values but the feature space declares {expected}")]
    Arity { expected: usize, found: usize },

    #[error("value {value} is outside the domain of feature `{feature}`")]
    Domain { feature: String, value: String },

    #[error("unknown feature `{0}`")]
    UnknownFeature(String),

    #[error("feature `{0}` has a domain that cannot be enumerated")]
    UnsupportedDomain(String),

    #[error("{what} needs {needed} entries, the limit is {limit}")]
    Capacity {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("invalid feature space: {0}")]
    InvalidSpace(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed explanation: {0}")]
    MalformedExplanation(String),

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Oracle(#[from] OracleError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
