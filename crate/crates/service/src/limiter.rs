//! Per-client sliding-log rate limiting.

use std::collections::{HashMap, VecDeque};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::config::RateLimit;

/// Admits at most `max` requests per client in any window of length
/// `window`. All bookkeeping happens under one lock, so admission is
/// linearizable no matter how many requests race.
#[derive(Debug)]
pub struct SlidingLog {
    max: usize,
    window: Duration,
    logs: Mutex<HashMap<String, VecDeque<Instant>>>,
}

impl SlidingLog {
    pub fn new(limit: &RateLimit) -> Self {
        Self {
            max: limit.max_queries as usize,
            window: limit.window(),
            logs: Mutex::new(HashMap::new()),
        }
    }

    /// Admits the request, or returns how long until a slot frees up.
    pub fn check(&self, client: &str) -> Result<(), Duration> {
        self.check_at(client, Instant::now())
    }

    pub fn check_at(&self, client: &str, now: Instant) -> Result<(), Duration> {
        let mut logs = self.logs.lock().expect("limiter lock poisoned");
        let log = logs.entry(client.to_owned()).or_default();
        while log.front().is_some_and(|&t| now.duration_since(t) >= self.window) {
            log.pop_front();
        }
        if log.len() < self.max {
            log.push_back(now);
            return Ok(());
        }
        let oldest = *log.front().expect("full log is non-empty");
        Err((oldest + self.window).saturating_duration_since(now))
    }
}
