//! Blocking client that treats a remote endpoint as an [`Oracle`].

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use bouncer_core::audit::{Oracle, OracleError, QueryRecord};
use bouncer_core::explain::{is_apropos, is_consequent};
use bouncer_core::{FeatureSpace, Instance, Label};
use reqwest::blocking::Client;
use reqwest::header::{CONTENT_TYPE, RETRY_AFTER};
use reqwest::StatusCode;

use crate::wire::{to_line, ClassifyReply, ClassifyRequest, ErrorReply, Health};

const TIMEOUT: Duration = Duration::from_secs(30);

/// Queries `POST {base}/v1/classify`, checks every explanation against the
/// query and the returned decision, and keeps a transcript.
pub struct RemoteOracle {
    base: String,
    client_id: String,
    space: FeatureSpace,
    http: Client,
    transcript: Mutex<Vec<QueryRecord>>,
    clock: AtomicU64,
}

impl RemoteOracle {
    pub fn new(base: &str, client_id: &str, space: FeatureSpace) -> Result<Self, OracleError> {
        let http = Client::builder()
            .timeout(TIMEOUT)
            .build()
            .map_err(|e| OracleError::Network(e.to_string()))?;
        Ok(Self {
            base: base.trim_end_matches('/').to_owned(),
            client_id: client_id.to_owned(),
            space,
            http,
            transcript: Mutex::new(Vec::new()),
            clock: AtomicU64::new(0),
        })
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn health(&self) -> Result<(), OracleError> {
        let resp = self
            .http
            .get(format!("{}/v1/health", self.base))
            .send()
            .map_err(|e| OracleError::Network(e.to_string()))?;
        let body = resp.text().map_err(|e| OracleError::Network(e.to_string()))?;
        let h: Health = serde_json::from_str(&body).map_err(|e| OracleError::Protocol(e.to_string()))?;
        if h.status != "ok" {
            return Err(OracleError::Rejected(format!("service status `{}`", h.status)));
        }
        Ok(())
    }

    /// Every accepted reply so far, ordered by the local clock.
    pub fn transcript(&self) -> Vec<QueryRecord> {
        let mut t = self.transcript.lock().expect("transcript lock poisoned").clone();
        t.sort_by_key(|r| r.timestamp);
        t
    }

    /// One raw round trip, returning the full reply.
    pub fn classify(&self, x: &Instance) -> Result<ClassifyReply, OracleError> {
        self.space.check(x).map_err(|e| OracleError::Rejected(e.to_string()))?;
        let body = to_line(&ClassifyRequest {
            client_id: self.client_id.clone(),
            features: self.space.to_map(x),
        });
        let resp = self
            .http
            .post(format!("{}/v1/classify", self.base))
            .header(CONTENT_TYPE, "application/json")
            .body(body)
            .send()
            .map_err(|e| OracleError::Network(e.to_string()))?;
        let status = resp.status();
        let header_wait = resp
            .headers()
            .get(RETRY_AFTER)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        let text = resp.text().map_err(|e| OracleError::Network(e.to_string()))?;
        if status == StatusCode::TOO_MANY_REQUESTS {
            let body_wait = serde_json::from_str::<ErrorReply>(&text)
                .ok()
                .and_then(|r| r.retry_after_ms)
                .map(Duration::from_millis);
            let wait = body_wait.or(header_wait).unwrap_or(Duration::from_secs(1));
            return Err(OracleError::RateLimited(wait));
        }
        if !status.is_success() {
            let msg = serde_json::from_str::<ErrorReply>(&text)
                .map(|r| r.error)
                .unwrap_or(text);
            return Err(OracleError::Rejected(format!("{status}: {msg}")));
        }
        let reply: ClassifyReply =
            serde_json::from_str(&text).map_err(|e| OracleError::Protocol(format!("bad reply: {e}")))?;
        if !is_consequent(&reply.explanation, reply.decision) {
            return Err(OracleError::Protocol(format!(
                "query {}: explanation concludes {} but decision is {}",
                reply.query_id, reply.explanation.label, reply.decision
            )));
        }
        match is_apropos(&reply.explanation, x, &self.space) {
            Ok(true) => {}
            Ok(false) => {
                return Err(OracleError::Protocol(format!(
                    "query {}: explanation `{}` does not hold on the query",
                    reply.query_id, reply.explanation
                )))
            }
            Err(e) => return Err(OracleError::Protocol(format!("query {}: {e}", reply.query_id))),
        }
        Ok(reply)
    }
}

impl Oracle for RemoteOracle {
    fn query(&self, x: &Instance) -> Result<Label, OracleError> {
        let reply = self.classify(x)?;
        let mut record = QueryRecord::new(x.clone(), reply.decision, self.clock.fetch_add(1, Ordering::Relaxed));
        record.explanation = Some(reply.explanation);
        self.transcript.lock().expect("transcript lock poisoned").push(record);
        Ok(reply.decision)
    }
}
