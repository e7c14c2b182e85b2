//! User-side detection of per-query surrogates.
//!
//! A user who can only query a remote model looks for *incoherent pairs*:
//! two inputs that agree on every legit feature yet receive different
//! decisions. Finding one proves the model depends on discriminative
//! features; not finding one proves nothing, so the module also provides
//! the confidence arithmetic for a given per-pair detection rate.

mod report;
mod scenarios;
mod stats;

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::Classifier;
use crate::explain::Explanation;
use crate::space::{FeatureSpace, Instance, Label, Value};

pub use report::{summarize, write_confidence_csv, write_report_csv, RateSummary};
pub use scenarios::{find_ip_exhaustive, scenario_a_probe, scenario_b_swap, Auditor};
pub use stats::{confidence, mean_and_stddev, queries_needed};

/// Failure modes of a query to a (possibly remote) model.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("rate limited, retry after {0:?}")]
    RateLimited(Duration),
    #[error("network failure: {0}")]
    Network(String),
    /// The reply broke the explanation contract (e.g. an explanation that
    /// contradicts the returned decision).
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("query rejected: {0}")]
    Rejected(String),
}

/// Something that answers decisions for instances.
pub trait Oracle: Sync {
    fn query(&self, x: &Instance) -> Result<Label, OracleError>;
}

impl<C: Classifier + ?Sized> Oracle for C {
    fn query(&self, x: &Instance) -> Result<Label, OracleError> {
        Ok(self.classify(x))
    }
}

/// One observed query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub instance: Instance,
    pub decision: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanation: Option<Explanation>,
    pub timestamp: u64,
}

impl QueryRecord {
    pub fn new(instance: Instance, decision: Label, timestamp: u64) -> Self {
        Self {
            instance,
            decision,
            explanation: None,
            timestamp,
        }
    }
}

/// Two records with equal legit parts and different decisions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncoherentPair {
    pub first: QueryRecord,
    pub second: QueryRecord,
}

impl IncoherentPair {
    /// Returns the pair only if it satisfies the definition exactly.
    pub fn new(space: &FeatureSpace, first: QueryRecord, second: QueryRecord) -> Option<Self> {
        let coherent = first.decision == second.decision
            || space.legit_part(&first.instance) != space.legit_part(&second.instance);
        (!coherent).then_some(Self { first, second })
    }
}

/// Outcome of one audit run against one model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub scenario: String,
    /// Discriminative features varied by the audit.
    pub features: Vec<String>,
    pub queries_issued: usize,
    pub pairs_tested: usize,
    pub ips_found: Vec<IncoherentPair>,
    pub ip_rate: f64,
    /// Probability that at least one pair is incoherent among
    /// `pairs_tested` independent pairs at rate `ip_rate`.
    pub confidence: f64,
}

impl AuditReport {
    pub(crate) fn new(
        scenario: &str,
        features: Vec<String>,
        queries_issued: usize,
        pairs_tested: usize,
        ips_found: Vec<IncoherentPair>,
    ) -> Self {
        let ip_rate = if pairs_tested == 0 {
            0.0
        } else {
            ips_found.len() as f64 / pairs_tested as f64
        };
        let confidence = confidence(ip_rate, pairs_tested as u64).unwrap_or(0.0);
        Self {
            scenario: scenario.to_owned(),
            features,
            queries_issued,
            pairs_tested,
            ips_found,
            ip_rate,
            confidence,
        }
    }
}

/// Runs batches of queries, optionally on several threads, backing off when
/// the oracle reports a rate limit. Results are always returned in input
/// order, so concurrency never changes an audit's outcome.
#[derive(Clone, Debug)]
pub struct QueryScheduler {
    pub workers: usize,
    /// Rate-limit retries allowed per query before giving up.
    pub max_retries: u32,
}

impl Default for QueryScheduler {
    fn default() -> Self {
        Self {
            workers: 1,
            max_retries: 100_000,
        }
    }
}

impl QueryScheduler {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers: workers.max(1),
            ..Self::default()
        }
    }

    fn query_one<O: Oracle + ?Sized>(&self, oracle: &O, x: &Instance) -> Result<Label, OracleError> {
        let mut retries = 0;
        loop {
            match oracle.query(x) {
                Err(OracleError::RateLimited(wait)) if retries < self.max_retries => {
                    retries += 1;
                    std::thread::sleep(wait.max(Duration::from_millis(1)));
                }
                other => return other,
            }
        }
    }

    pub fn run<O: Oracle + ?Sized>(&self, oracle: &O, xs: &[Instance]) -> Result<Vec<Label>, OracleError> {
        if self.workers <= 1 || xs.len() < 2 {
            return xs.iter().map(|x| self.query_one(oracle, x)).collect();
        }
        let next = AtomicUsize::new(0);
        let failed = AtomicBool::new(false);
        let results: Mutex<Vec<Option<Label>>> = Mutex::new(vec![None; xs.len()]);
        let error: Mutex<Option<OracleError>> = Mutex::new(None);
        std::thread::scope(|scope| {
            for _ in 0..self.workers.min(xs.len()) {
                scope.spawn(|| loop {
                    if failed.load(Ordering::Relaxed) {
                        return;
                    }
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= xs.len() {
                        return;
                    }
                    match self.query_one(oracle, &xs[i]) {
                        Ok(y) => results.lock().unwrap()[i] = Some(y),
                        Err(e) => {
                            failed.store(true, Ordering::Relaxed);
                            error.lock().unwrap().get_or_insert(e);
                            return;
                        }
                    }
                });
            }
        });
        if let Some(e) = error.into_inner().unwrap() {
            return Err(e);
        }
        Ok(results
            .into_inner()
            .unwrap()
            .into_iter()
            .map(|y| y.expect("every query answered"))
            .collect())
    }
}

/// All incoherent pairs in a query log, ordered by the positions of their
/// records. Records are grouped by legit part, so the cost is linear in the
/// log plus the number of pairs reported.
pub fn check_coherence_log(space: &FeatureSpace, records: &[QueryRecord]) -> Vec<IncoherentPair> {
    let mut groups: HashMap<Vec<Value>, Vec<usize>> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        groups.entry(space.legit_part(&r.instance)).or_default().push(i);
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for members in groups.values() {
        for (k, &i) in members.iter().enumerate() {
            for &j in &members[k + 1..] {
                if records[i].decision != records[j].decision {
                    pairs.push((i, j));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs
        .into_iter()
        .map(|(i, j)| IncoherentPair {
            first: records[i].clone(),
            second: records[j].clone(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::FnClassifier;
    use crate::tree::bouncer;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rec(space: &FeatureSpace, vals: [i64; 3], y: Label, t: u64) -> QueryRecord {
        let x = space.instance(vals.iter().map(|&v| Value::Int(v)).collect()).unwrap();
        QueryRecord::new(x, y, t)
    }

    fn small_space() -> FeatureSpace {
        use crate::space::{Domain, FeatureSpec};
        FeatureSpace::new(vec![
            FeatureSpec::legit("a", Domain::Integer { lo: 0, hi: 2 }),
            FeatureSpec::discriminative("d", Domain::Integer { lo: 0, hi: 2 }),
            FeatureSpec::legit("b", Domain::Integer { lo: 0, hi: 1 }),
        ])
        .unwrap()
    }

    #[test]
    fn empty_log_has_no_pairs() {
        assert!(check_coherence_log(&small_space(), &[]).is_empty());
    }

    #[test]
    fn bouncer_pair_is_found_in_a_log() {
        let t = bouncer::tree();
        let s = t.space();
        let young = s.instance(vec!["yes".into(), "pink".into(), 49i64.into()]).unwrap();
        let old = s.instance(vec!["yes".into(), "pink".into(), 62i64.into()]).unwrap();
        let other = s.instance(vec!["no".into(), "pink".into(), 62i64.into()]).unwrap();
        let log: Vec<QueryRecord> = [young, other, old]
            .into_iter()
            .enumerate()
            .map(|(i, x)| {
                let y = t.classify(&x);
                QueryRecord::new(x, y, i as u64)
            })
            .collect();
        let pairs = check_coherence_log(s, &log);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].first.timestamp, 0);
        assert_eq!(pairs[0].second.timestamp, 2);
    }

    #[test]
    fn log_check_matches_quadratic_scan() {
        let space = small_space();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.random_range(0..40);
            let log: Vec<QueryRecord> = (0..n)
                .map(|t| {
                    let vals = [rng.random_range(0..3), rng.random_range(0..3), rng.random_range(0..2)];
                    rec(&space, vals, Label::from_bool(rng.random_bool(0.5)), t)
                })
                .collect();
            let mut brute = Vec::new();
            for i in 0..log.len() {
                for j in i + 1..log.len() {
                    if let Some(p) = IncoherentPair::new(&space, log[i].clone(), log[j].clone()) {
                        brute.push(p);
                    }
                }
            }
            assert_eq!(check_coherence_log(&space, &log), brute);
        }
    }

    #[test]
    fn pair_constructor_enforces_definition() {
        let space = small_space();
        let a = rec(&space, [1, 0, 1], Label::One, 0);
        let b = rec(&space, [1, 2, 1], Label::Zero, 1);
        let c = rec(&space, [2, 2, 1], Label::Zero, 2);
        assert!(IncoherentPair::new(&space, a.clone(), b.clone()).is_some());
        assert!(IncoherentPair::new(&space, a.clone(), c).is_none());
        assert!(IncoherentPair::new(&space, b.clone(), b).is_none());
    }

    struct Limited {
        calls: AtomicUsize,
    }

    impl Oracle for Limited {
        fn query(&self, x: &Instance) -> Result<Label, OracleError> {
            if self.calls.fetch_add(1, Ordering::SeqCst) % 3 == 0 {
                return Err(OracleError::RateLimited(Duration::from_millis(1)));
            }
            Ok(Label::from_bool(x.get(0) == &Value::Int(1)))
        }
    }

    #[test]
    fn scheduler_backs_off_and_preserves_order() {
        let space = small_space();
        let xs = space.all_instances().unwrap();
        let expected: Vec<Label> = xs
            .iter()
            .map(|x| Label::from_bool(x.get(0) == &Value::Int(1)))
            .collect();
        for workers in [1, 4] {
            let oracle = Limited {
                calls: AtomicUsize::new(0),
            };
            let got = QueryScheduler::with_workers(workers).run(&oracle, &xs).unwrap();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn scheduler_surfaces_hard_errors() {
        let space = small_space();
        let xs = space.all_instances().unwrap();
        struct Broken;
        impl Oracle for Broken {
            fn query(&self, _: &Instance) -> Result<Label, OracleError> {
                Err(OracleError::Network("down".into()))
            }
        }
        for workers in [1, 3] {
            let err = QueryScheduler::with_workers(workers).run(&Broken, &xs);
            assert_eq!(err, Err(OracleError::Network("down".into())));
        }
        let ok = FnClassifier(|_: &Instance| Label::One);
        assert!(QueryScheduler::default().run(&ok, &xs).is_ok());
    }
}
