//! Greedy top-down induction (CART-style, Gini impurity).
//!
//! Numeric features split at midpoints between consecutive distinct values;
//! categorical features split one value against the rest. Ties in gain go to
//! the lower feature index, then the lower threshold (or earlier domain
//! value), so training is deterministic.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Domain, FeatureSpace, Instance, Label};

use super::{DecisionTree, Node, Predicate, Test};

const MIN_GAIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Impurity {
    #[default]
    Gini,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_depth: usize,
    pub min_samples_split: usize,
    #[serde(default)]
    pub impurity: Impurity,
    /// Restricts splits to these features when set.
    #[serde(default)]
    pub feature_whitelist: Option<Vec<String>>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_depth: 4,
            min_samples_split: 2,
            impurity: Impurity::Gini,
            feature_whitelist: None,
        }
    }
}

#[derive(Clone, Copy, Default)]
struct Counts {
    zero: usize,
    one: usize,
}

impl Counts {
    fn add(&mut self, l: Label) {
        match l {
            Label::Zero => self.zero += 1,
            Label::One => self.one += 1,
        }
    }

    fn total(&self) -> usize {
        self.zero + self.one
    }

    fn gini(&self) -> f64 {
        let n = self.total() as f64;
        if n == 0.0 {
            return 0.0;
        }
        let p = self.one as f64 / n;
        2.0 * p * (1.0 - p)
    }

    fn majority(&self) -> Label {
        Label::from_bool(self.one > self.zero)
    }
}

struct Candidate {
    gain: f64,
    predicate: Predicate,
}

struct Trainer<'a> {
    space: &'a FeatureSpace,
    data: &'a [(Instance, Label)],
    features: Vec<usize>,
    cfg: &'a TrainConfig,
}

/// Fits a tree on labeled instances of `space`.
pub fn train(space: &FeatureSpace, data: &[(Instance, Label)], cfg: &TrainConfig) -> Result<DecisionTree> {
    if data.is_empty() {
        return Err(Error::Dataset("cannot train on an empty dataset".into()));
    }
    if cfg.max_depth == 0 {
        return Err(Error::InvalidArgument("max_depth must be at least 1".into()));
    }
    for (x, _) in data {
        space.check(x)?;
    }
    let features = match &cfg.feature_whitelist {
        None => (0..space.len()).collect(),
        Some(names) => {
            let mut idx = names.iter().map(|n| space.require(n)).collect::<Result<Vec<_>>>()?;
            idx.sort_unstable();
            idx.dedup();
            idx
        }
    };
    let trainer = Trainer {
        space,
        data,
        features,
        cfg,
    };
    let rows: Vec<usize> = (0..data.len()).collect();
    let root = trainer.grow(&rows, 0);
    DecisionTree::new(space.clone(), root)
}

impl Trainer<'_> {
    fn counts(&self, rows: &[usize]) -> Counts {
        let mut c = Counts::default();
        for &r in rows {
            c.add(self.data[r].1);
        }
        c
    }

    fn grow(&self, rows: &[usize], depth: usize) -> Node {
        let counts = self.counts(rows);
        if depth >= self.cfg.max_depth
            || rows.len() < self.cfg.min_samples_split.max(2)
            || counts.zero == 0
            || counts.one == 0
        {
            return Node::leaf(counts.majority());
        }
        let Some(best) = self.best_split(rows, &counts) else {
            return Node::leaf(counts.majority());
        };
        let feature = self
            .space
            .require(&best.predicate.feature)
            .expect("split feature exists");
        let (yes, no): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| best.predicate.eval(self.data[r].0.get(feature)));
        Node::split(best.predicate, self.grow(&yes, depth + 1), self.grow(&no, depth + 1))
    }

    fn best_split(&self, rows: &[usize], parent: &Counts) -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        let parent_impurity = parent.gini();
        let n = rows.len() as f64;
        for &f in &self.features {
            let spec = self.space.feature(f);
            let candidates = match &spec.domain {
                Domain::Categorical { values } => self.categorical_candidates(rows, f, values),
                _ => self.numeric_candidates(rows, f),
            };
            for (predicate, yes, no) in candidates {
                let gain =
                    parent_impurity - (yes.total() as f64 / n) * yes.gini() - (no.total() as f64 / n) * no.gini();
                if gain > MIN_GAIN && best.as_ref().is_none_or(|b| gain > b.gain + MIN_GAIN) {
                    best = Some(Candidate { gain, predicate });
                }
            }
        }
        best
    }

    fn numeric_candidates(&self, rows: &[usize], f: usize) -> Vec<(Predicate, Counts, Counts)> {
        let mut pts: Vec<(f64, Label)> = rows
            .iter()
            .map(|&r| {
                let (x, y) = &self.data[r];
                (x.get(f).as_f64().expect("numeric feature"), *y)
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total = self.counts(rows);
        let name = &self.space.feature(f).name;
        let mut left = Counts::default();
        let mut out = Vec::new();
        for i in 0..pts.len() - 1 {
            left.add(pts[i].1);
            if pts[i].0 < pts[i + 1].0 {
                let threshold = pts[i].0 + (pts[i + 1].0 - pts[i].0) / 2.0;
                let right = Counts {
                    zero: total.zero - left.zero,
                    one: total.one - left.one,
                };
                out.push((Predicate::le(name, threshold), left, right));
            }
        }
        out
    }

    fn categorical_candidates(&self, rows: &[usize], f: usize, values: &[String]) -> Vec<(Predicate, Counts, Counts)> {
        let total = self.counts(rows);
        let name = &self.space.feature(f).name;
        let mut out = Vec::new();
        for v in values {
            let mut yes = Counts::default();
            for &r in rows {
                let (x, y) = &self.data[r];
                if x.get(f).as_str() == Some(v.as_str()) {
                    yes.add(*y);
                }
            }
            if yes.total() == 0 || yes.total() == total.total() {
                continue;
            }
            let no = Counts {
                zero: total.zero - yes.zero,
                one: total.one - yes.one,
            };
            let predicate = Predicate {
                feature: name.clone(),
                test: Test::In(BTreeSet::from([v.clone()])),
            };
            out.push((predicate, yes, no));
        }
        out
    }
}
