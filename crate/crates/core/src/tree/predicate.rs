use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Domain, FeatureSpace, Value};

/// A single-feature test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "value", rename_all = "snake_case")]
pub enum Test {
    /// Numeric `value <= threshold`.
    Le(f64),
    /// Categorical membership.
    In(BTreeSet<String>),
    /// Exact equality. Only produced by point-surrogate explanations.
    Eq(Value),
}

/// A test on one named feature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub feature: String,
    #[serde(flatten)]
    pub test: Test,
}

impl Predicate {
    pub fn le(feature: &str, threshold: f64) -> Self {
        Self {
            feature: feature.to_owned(),
            test: Test::Le(threshold),
        }
    }

    pub fn is_in<'a>(feature: &str, values: impl IntoIterator<Item = &'a str>) -> Self {
        Self {
            feature: feature.to_owned(),
            test: Test::In(values.into_iter().map(str::to_owned).collect()),
        }
    }

    pub fn eq(feature: &str, value: Value) -> Self {
        Self {
            feature: feature.to_owned(),
            test: Test::Eq(value),
        }
    }

    /// Evaluates the test on a raw feature value. Type mismatches are false.
    pub fn eval(&self, v: &Value) -> bool {
        match &self.test {
            Test::Le(t) => v.as_f64().is_some_and(|x| x <= *t),
            Test::In(set) => v.as_str().is_some_and(|s| set.contains(s)),
            Test::Eq(e) => v == e,
        }
    }

    /// Checks the predicate against `space`, returning the feature index.
    pub fn resolve(&self, space: &FeatureSpace) -> Result<usize> {
        let idx = space.require(&self.feature)?;
        let spec = space.feature(idx);
        let ok = match (&self.test, &spec.domain) {
            (Test::Le(t), Domain::Integer { lo, hi }) => t.is_finite() && *t >= *lo as f64 && *t <= *hi as f64,
            (Test::Le(t), Domain::Real { lo, hi }) => t.is_finite() && t >= lo && t <= hi,
            (Test::In(set), Domain::Categorical { values }) => {
                !set.is_empty() && set.iter().all(|s| values.contains(s))
            }
            (Test::Eq(v), d) => d.contains(v),
            _ => false,
        };
        if ok {
            Ok(idx)
        } else {
            Err(Error::MalformedTree(format!(
                "predicate `{self}` does not fit the domain of `{}`",
                spec.name
            )))
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.test {
            Test::Le(t) => write!(f, "{} <= {}", self.feature, t),
            Test::In(set) => {
                let items: Vec<&str> = set.iter().map(String::as_str).collect();
                if items.len() == 1 {
                    write!(f, "{} = {}", self.feature, items[0])
                } else {
                    write!(f, "{} in {{{}}}", self.feature, items.join(", "))
                }
            }
            Test::Eq(v) => write!(f, "{} == {}", self.feature, v),
        }
    }
}
