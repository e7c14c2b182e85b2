//! German Credit ingestion and the single-hidden-layer network experiment.

mod convert;
mod experiment;
mod mlp;

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Domain, FeatureSpace, FeatureSpec, Instance, Label, Value};

pub use convert::convert_german_categorical;
pub use experiment::{replicate, run_seed, CreditModel, ExperimentConfig, SeedRun};
pub use mlp::{
    gradient_check, train_mlp, EpochMetrics, Mlp, MlpModel, Scaling, SplitMode, Standardizer, TrainOutcome, TrainSpec,
};

pub const FEATURES: usize = 24;

/// Column naming, discriminative attributes and the replication protocol.
pub const DEFAULT_CONFIG: &str = include_str!("../../assets/german-credit.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CreditRecord {
    pub features: Vec<f64>,
    pub label: Label,
}

/// Parses the 25-column numeric file. Class 1 (good) maps to label 1, class 2
/// (bad) to label 0.
pub fn load_german_numeric<R: Read>(mut r: R) -> Result<Vec<CreditRecord>> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = lineno + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != FEATURES + 1 {
            return Err(Error::Dataset(format!(
                "line {row}: expected {} columns, found {}",
                FEATURES + 1,
                tokens.len()
            )));
        }
        let values = tokens
            .iter()
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::Dataset(format!("line {row}: `{t}` is not an integer")))
            })
            .collect::<Result<Vec<i64>>>()?;
        let label = match values[FEATURES] {
            1 => Label::One,
            2 => Label::Zero,
            c => return Err(Error::Dataset(format!("line {row}: class {c} is not 1 or 2"))),
        };
        out.push(CreditRecord {
            features: values[..FEATURES].iter().map(|&v| v as f64).collect(),
            label,
        });
    }
    if out.is_empty() {
        return Err(Error::Dataset("no records in input".into()));
    }
    Ok(out)
}

/// An attribute treated as discriminative. Without bounds, the domain is the
/// observed range of the column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscriminativeAttr {
    pub name: String,
    #[serde(default)]
    pub lo: Option<i64>,
    #[serde(default)]
    pub hi: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CreditConfig {
    /// Names of the 24 feature columns, in file order.
    pub columns: Vec<String>,
    #[serde(default)]
    pub discriminative: Vec<DiscriminativeAttr>,
    #[serde(default)]
    pub experiment: ExperimentConfig,
}

impl CreditConfig {
    pub fn from_toml(doc: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(doc)?;
        if cfg.columns.len() != FEATURES {
            return Err(Error::Config(format!(
                "expected {FEATURES} column names, found {}",
                cfg.columns.len()
            )));
        }
        Ok(cfg)
    }
}

impl Default for CreditConfig {
    fn default() -> Self {
        Self::from_toml(DEFAULT_CONFIG).expect("bundled config is valid")
    }
}

/// Column indices of the configured discriminative attributes, in config
/// order.
pub fn discriminative_feature_map(cfg: &CreditConfig) -> Result<Vec<usize>> {
    if cfg.discriminative.is_empty() {
        return Err(Error::Config("no discriminative attributes configured".into()));
    }
    cfg.discriminative
        .iter()
        .map(|a| {
            cfg.columns
                .iter()
                .position(|c| *c == a.name)
                .ok_or_else(|| Error::Config(format!("unresolved attribute `{}`", a.name)))
        })
        .collect()
}

/// Integer feature space over the records: discriminative columns use their
/// configured bounds, everything else its observed range.
pub fn credit_space(cfg: &CreditConfig, records: &[CreditRecord]) -> Result<FeatureSpace> {
    let disc = discriminative_feature_map(cfg)?;
    if records.is_empty() {
        return Err(Error::Dataset("no records".into()));
    }
    let specs = cfg
        .columns
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let lo_obs = records.iter().map(|r| r.features[i] as i64).min().unwrap();
            let hi_obs = records.iter().map(|r| r.features[i] as i64).max().unwrap();
            match disc.iter().position(|&d| d == i) {
                Some(k) => {
                    let a = &cfg.discriminative[k];
                    let lo = a.lo.unwrap_or(lo_obs).min(lo_obs);
                    let hi = a.hi.unwrap_or(hi_obs).max(hi_obs);
                    FeatureSpec::discriminative(name, Domain::Integer { lo, hi })
                }
                None => FeatureSpec::legit(name, Domain::Integer { lo: lo_obs, hi: hi_obs }),
            }
        })
        .collect();
    FeatureSpace::new(specs)
}

/// Wraps a record's features as an instance of `space`.
pub fn record_instance(space: &FeatureSpace, r: &CreditRecord) -> Result<Instance> {
    space.instance(r.features.iter().map(|&v| Value::Int(v as i64)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(class: i64) -> String {
        let mut v: Vec<String> = (1..=24).map(|i| i.to_string()).collect();
        v.push(class.to_string());
        v.join(" ")
    }

    #[test]
    fn two_row_fixture() {
        let doc = format!("{}\n{}\n", row(1), row(2));
        let recs = load_german_numeric(doc.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].label, Label::One);
        assert_eq!(recs[1].label, Label::Zero);
        assert_eq!(recs[0].features.len(), 24);
        assert_eq!(recs[0].features[23], 24.0);
    }

    #[test]
    fn loader_errors() {
        assert!(matches!(load_german_numeric(&b""[..]), Err(Error::Dataset(_))));
        assert!(load_german_numeric(&b"1 2 3\n"[..]).is_err());
        let bad = row(1).replacen("5", "x", 1);
        assert!(load_german_numeric(bad.as_bytes()).is_err());
        assert!(load_german_numeric(row(3).as_bytes()).is_err());
    }

    #[test]
    fn default_config_tags_four_attributes() {
        let cfg = CreditConfig::default();
        let disc = discriminative_feature_map(&cfg).unwrap();
        assert_eq!(disc.len(), 4);
        let names: Vec<&str> = disc.iter().map(|&i| cfg.columns[i].as_str()).collect();
        assert_eq!(names, ["employment", "sex_status", "age", "foreigner"]);
        assert_eq!(cfg.experiment.swap_sets.len(), 5);
        assert_eq!(cfg.experiment.train.learning_rate, 0.1);
    }

    #[test]
    fn feature_map_errors() {
        let mut cfg = CreditConfig::default();
        cfg.discriminative.clear();
        assert!(discriminative_feature_map(&cfg).is_err());
        let mut cfg = CreditConfig::default();
        cfg.discriminative[0].name = "shoe_size".into();
        assert!(matches!(discriminative_feature_map(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn space_splits_into_four_and_twenty() {
        let cfg = CreditConfig::default();
        let doc = format!("{}\n{}\n", row(1), row(2));
        let recs = load_german_numeric(doc.as_bytes()).unwrap();
        let space = credit_space(&cfg, &recs).unwrap();
        assert_eq!(space.discriminative_indices().len(), 4);
        assert_eq!(space.legit_indices().len(), 20);
        let x = record_instance(&space, &recs[0]).unwrap();
        let (l, d) = space.split_instance(&x).unwrap();
        assert_eq!((l.len(), d.len()), (20, 4));
    }
}
