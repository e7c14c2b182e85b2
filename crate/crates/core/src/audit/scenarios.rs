//! The three search strategies: exhaustive enumeration, random
//! discriminative perturbations (scenario A) and profile swaps (scenario B).
//!
//! Each strategy first builds a deterministic query plan, then hands the
//! whole plan to the scheduler. Pair outcomes are read back from the plan
//! positions, so worker count and back-off never change a report.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::space::{FeatureSpace, Instance, Label, Value};

use super::{AuditReport, IncoherentPair, Oracle, QueryRecord, QueryScheduler};

/// Audits a single oracle over a known feature space.
#[derive(Clone, Debug)]
pub struct Auditor<'a> {
    pub space: &'a FeatureSpace,
    pub scheduler: QueryScheduler,
}

struct Plan {
    queries: Vec<Instance>,
    /// (original, modified) positions in `queries`.
    pairs: Vec<(usize, usize)>,
}

impl<'a> Auditor<'a> {
    pub fn new(space: &'a FeatureSpace) -> Self {
        Self {
            space,
            scheduler: QueryScheduler::default(),
        }
    }

    pub fn with_scheduler(mut self, scheduler: QueryScheduler) -> Self {
        self.scheduler = scheduler;
        self
    }

    fn execute<O: Oracle + ?Sized>(
        &self,
        scenario: &str,
        features: Vec<String>,
        plan: Plan,
        oracle: &O,
    ) -> Result<AuditReport> {
        let labels = self.scheduler.run(oracle, &plan.queries)?;
        let record = |i: usize| QueryRecord::new(plan.queries[i].clone(), labels[i], i as u64);
        let ips = plan
            .pairs
            .iter()
            .filter(|&&(a, b)| labels[a] != labels[b])
            .filter_map(|&(a, b)| IncoherentPair::new(self.space, record(a), record(b)))
            .collect();
        Ok(AuditReport::new(
            scenario,
            features,
            plan.queries.len(),
            plan.pairs.len(),
            ips,
        ))
    }

    /// Queries every instance of the space and returns the first incoherent
    /// pair in enumeration order, if any.
    pub fn find_ip_exhaustive<O: Oracle + ?Sized>(&self, oracle: &O) -> Result<Option<IncoherentPair>> {
        let xs = self.space.all_instances()?;
        let labels = self.scheduler.run(oracle, &xs)?;
        let mut first_seen: HashMap<Vec<Value>, (usize, Label)> = HashMap::new();
        for (i, (x, &y)) in xs.iter().zip(&labels).enumerate() {
            match first_seen.get(&self.space.legit_part(x)) {
                Some(&(j, yj)) if yj != y => {
                    let a = QueryRecord::new(xs[j].clone(), yj, j as u64);
                    let b = QueryRecord::new(x.clone(), y, i as u64);
                    return Ok(IncoherentPair::new(self.space, a, b));
                }
                Some(_) => {}
                None => {
                    first_seen.insert(self.space.legit_part(x), (i, y));
                }
            }
        }
        Ok(None)
    }

    /// Scenario A: `trials` times, pick a seed profile and a discriminative
    /// feature at random and resample that feature uniformly from its domain.
    ///
    /// Trial `t` draws from a ChaCha8 stream keyed by (`rng_seed`, `t`).
    /// Each seed is queried once, so `queries_issued = seeds + trials`.
    pub fn scenario_a_probe<O: Oracle + ?Sized>(
        &self,
        seeds: &[Instance],
        oracle: &O,
        trials: usize,
        rng_seed: u64,
    ) -> Result<AuditReport> {
        if seeds.is_empty() {
            return Err(Error::InvalidArgument("scenario A needs at least one seed".into()));
        }
        if trials == 0 {
            return Err(Error::InvalidArgument("scenario A needs at least one trial".into()));
        }
        let disc = self.space.discriminative_indices();
        if disc.is_empty() {
            return Err(Error::InvalidArgument(
                "the feature space has no discriminative feature".into(),
            ));
        }
        for s in seeds {
            self.space.check(s)?;
        }
        let mut queries: Vec<Instance> = seeds.to_vec();
        let mut pairs = Vec::with_capacity(trials);
        for t in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(t as u64);
            let s = rng.random_range(0..seeds.len());
            let f = disc[rng.random_range(0..disc.len())];
            let v = self.space.feature(f).domain.sample(&mut rng);
            pairs.push((s, queries.len()));
            queries.push(seeds[s].with(f, v));
        }
        let features = disc.iter().map(|&i| self.space.feature(i).name.clone()).collect();
        self.execute("a", features, Plan { queries, pairs }, oracle)
    }

    /// Scenario B: for every ordered pair of distinct profiles `(p, q)`,
    /// copy `q`'s values of `swap_set` into `p`.
    pub fn scenario_b_swap<O: Oracle + ?Sized>(
        &self,
        profiles: &[Instance],
        oracle: &O,
        swap_set: &[usize],
    ) -> Result<AuditReport> {
        if profiles.len() < 2 {
            return Err(Error::InvalidArgument("scenario B needs at least two profiles".into()));
        }
        if swap_set.is_empty() {
            return Err(Error::InvalidArgument("empty swap set".into()));
        }
        for &f in swap_set {
            if f >= self.space.len() || !self.space.is_discriminative(f) {
                return Err(Error::InvalidArgument(format!(
                    "swap set index {f} is not a discriminative feature"
                )));
            }
        }
        for p in profiles {
            self.space.check(p)?;
        }
        let n = profiles.len();
        let mut queries: Vec<Instance> = profiles.to_vec();
        let mut pairs = Vec::with_capacity(n * (n - 1));
        for (i, p) in profiles.iter().enumerate() {
            for (j, q) in profiles.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut values = p.values().to_vec();
                for &f in swap_set {
                    values[f] = q.get(f).clone();
                }
                pairs.push((i, queries.len()));
                queries.push(Instance::from_values_unchecked(values));
            }
        }
        let features = swap_set.iter().map(|&i| self.space.feature(i).name.clone()).collect();
        self.execute("b", features, Plan { queries, pairs }, oracle)
    }
}

/// Single-threaded form of [`Auditor::find_ip_exhaustive`].
pub fn find_ip_exhaustive<O: Oracle + ?Sized>(oracle: &O, space: &FeatureSpace) -> Result<Option<IncoherentPair>> {
    Auditor::new(space).find_ip_exhaustive(oracle)
}

/// Single-threaded form of [`Auditor::scenario_a_probe`].
pub fn scenario_a_probe<O: Oracle + ?Sized>(
    space: &FeatureSpace,
    seeds: &[Instance],
    oracle: &O,
    trials: usize,
    rng_seed: u64,
) -> Result<AuditReport> {
    Auditor::new(space).scenario_a_probe(seeds, oracle, trials, rng_seed)
}

/// Single-threaded form of [`Auditor::scenario_b_swap`].
pub fn scenario_b_swap<O: Oracle + ?Sized>(
    space: &FeatureSpace,
    profiles: &[Instance],
    oracle: &O,
    swap_set: &[usize],
) -> Result<AuditReport> {
    Auditor::new(space).scenario_b_swap(profiles, oracle, swap_set)
}
