//! The per-seed protocol: train a network, pick held-out profiles, and audit
//! the network with both scenarios.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audit::{AuditReport, Auditor};
use crate::classifier::Classifier;
use crate::error::{Error, Result};
use crate::space::{FeatureSpace, Instance, Label};

use super::{record_instance, train_mlp, CreditRecord, EpochMetrics, MlpModel, TrainSpec};

/// A trained network wrapped as a classifier over integer instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CreditModel {
    pub space: FeatureSpace,
    pub model: MlpModel,
}

impl CreditModel {
    pub fn from_json(doc: &str) -> Result<Self> {
        Ok(serde_json::from_str(doc)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("models always serialize")
    }

    fn raw(x: &Instance) -> Vec<f64> {
        x.values().iter().map(|v| v.as_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl Classifier for CreditModel {
    fn classify(&self, x: &Instance) -> Label {
        self.model.classify(&Self::raw(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub train: TrainSpec,
    /// Held-out profiles audited per model.
    pub profiles: usize,
    /// Scenario A trials per model.
    pub trials: usize,
    /// Scenario B swap sets, by feature name.
    pub swap_sets: Vec<Vec<String>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let four = ["employment", "sex_status", "age", "foreigner"];
        let mut swap_sets: Vec<Vec<String>> = four.iter().map(|f| vec![f.to_string()]).collect();
        swap_sets.push(four.iter().map(|f| f.to_string()).collect());
        Self {
            train: TrainSpec::default(),
            profiles: 50,
            trials: 500,
            swap_sets,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeedRun {
    pub seed: u64,
    pub val_accuracy: f64,
    pub history: Vec<EpochMetrics>,
    pub model: CreditModel,
    pub profiles: Vec<Instance>,
    pub scenario_a: AuditReport,
    /// One report per configured swap set, in order.
    pub scenario_b: Vec<AuditReport>,
}

/// Trains with `seed` and audits the result. Profiles are drawn without
/// replacement from the validation rows.
pub fn run_seed(cfg: &ExperimentConfig, space: &FeatureSpace, records: &[CreditRecord], seed: u64) -> Result<SeedRun> {
    let spec = TrainSpec {
        seed,
        ..cfg.train.clone()
    };
    let xs: Vec<Vec<f64>> = records.iter().map(|r| r.features.clone()).collect();
    let ys: Vec<Label> = records.iter().map(|r| r.label).collect();
    let out = train_mlp(&xs, &ys, &spec)?;
    if out.val_rows.len() < cfg.profiles {
        return Err(Error::InvalidArgument(format!(
            "{} profiles requested but only {} validation rows",
            cfg.profiles,
            out.val_rows.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let profiles = out
        .val_rows
        .choose_multiple(&mut rng, cfg.profiles)
        .map(|&i| record_instance(space, &records[i]))
        .collect::<Result<Vec<_>>>()?;
    let model = CreditModel {
        space: space.clone(),
        model: out.model,
    };
    let auditor = Auditor::new(space);
    let scenario_a = auditor.scenario_a_probe(&profiles, &model, cfg.trials, seed)?;
    let scenario_b = cfg
        .swap_sets
        .iter()
        .map(|set| {
            let idx = set.iter().map(|n| space.require(n)).collect::<Result<Vec<_>>>()?;
            auditor.scenario_b_swap(&profiles, &model, &idx)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeedRun {
        seed,
        val_accuracy: out.val_accuracy,
        history: out.history,
        model,
        profiles,
        scenario_a,
        scenario_b,
    })
}

/// Runs every seed concurrently; results come back in seed order.
pub fn replicate(
    cfg: &ExperimentConfig,
    space: &FeatureSpace,
    records: &[CreditRecord],
    seeds: &[u64],
) -> Result<Vec<SeedRun>> {
    seeds.par_iter().map(|&s| run_seed(cfg, space, records, s)).collect()
}
