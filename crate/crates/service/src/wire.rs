//! Request and reply bodies. Each body is one JSON document followed by a
//! newline.

use std::collections::BTreeMap;

use bouncer_core::{Explanation, Label, Value};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyRequest {
    pub client_id: String,
    pub features: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReply {
    pub decision: Label,
    pub explanation: Explanation,
    pub query_id: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReply {
    pub error: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retry_after_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
}

/// Serializes `v` as a single line.
pub fn to_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("wire types always serialize");
    s.push('\n');
    s
}
