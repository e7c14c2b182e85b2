//! Feature spaces, instances and labels.
//!
//! A [`FeatureSpace`] is an ordered list of features, each tagged either
//! legitimate or discriminative. Instances are laid out in that order and can
//! always be decomposed into their legitimate and discriminative parts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Upper bound on the number of assignments an enumeration may produce.
pub const MAX_ENUMERATION: u128 = 1 << 24;

/// A single feature value.
///
/// Real values compare bitwise so that legit-part equality is exact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Real(f64),
    Cat(String),
}

impl Value {
    pub fn cat(s: &str) -> Self {
        Value::Cat(s.to_owned())
    }

    /// Numeric view of the value; `None` for categorical values.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(v) => Some(*v as f64),
            Value::Real(v) => Some(*v),
            Value::Cat(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Cat(s) => Some(s),
            _ => None,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Real(a), Value::Real(b)) => a.to_bits() == b.to_bits(),
            (Value::Cat(a), Value::Cat(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Value::Int(v) => {
                0u8.hash(state);
                v.hash(state);
            }
            Value::Real(v) => {
                1u8.hash(state);
                v.to_bits().hash(state);
            }
            Value::Cat(v) => {
                2u8.hash(state);
                v.hash(state);
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v) => write!(f, "{v}"),
            Value::Cat(v) => f.write_str(v),
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Cat(v.to_owned())
    }
}

/// The set of values a feature may take.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Integer { lo: i64, hi: i64 },
    Categorical { values: Vec<String> },
    Real { lo: f64, hi: f64 },
}

impl Domain {
    /// Parses the textual form of a value of this domain. No range check.
    pub fn parse(&self, feature: &str, text: &str) -> Result<Value> {
        let text = text.trim();
        let bad = || Error::Domain {
            feature: feature.to_owned(),
            value: text.to_owned(),
        };
        match self {
            Domain::Integer { .. } => text.parse::<i64>().map(Value::Int).map_err(|_| bad()),
            Domain::Real { .. } => text.parse::<f64>().map(Value::Real).map_err(|_| bad()),
            Domain::Categorical { .. } => Ok(Value::cat(text)),
        }
    }

    fn validate(&self, feature: &str) -> Result<()> {
        let ok = match self {
            Domain::Integer { lo, hi } => lo <= hi,
            Domain::Categorical { values } => {
                let mut seen = values.clone();
                seen.sort();
                seen.dedup();
                !values.is_empty() && seen.len() == values.len()
            }
            Domain::Real { lo, hi } => lo.is_finite() && hi.is_finite() && lo <= hi,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpace(format!(
                "feature `{feature}` has an empty or malformed domain"
            )))
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Domain::Integer { lo, hi }, Value::Int(x)) => lo <= x && x <= hi,
            (Domain::Real { lo, hi }, Value::Real(x)) => *lo <= *x && *x <= *hi,
            (Domain::Categorical { values }, Value::Cat(x)) => values.iter().any(|c| c == x),
            _ => false,
        }
    }

    /// Number of values, or `None` for real intervals.
    pub fn cardinality(&self) -> Option<u128> {
        match self {
            Domain::Integer { lo, hi } => Some((*hi as i128 - *lo as i128 + 1) as u128),
            Domain::Categorical { values } => Some(values.len() as u128),
            Domain::Real { .. } => None,
        }
    }

    /// Value at position `i` of the domain's canonical order.
    pub fn value_at(&self, i: usize) -> Option<Value> {
        match self {
            Domain::Integer { lo, hi } => {
                let v = lo.checked_add(i as i64)?;
                (v <= *hi).then_some(Value::Int(v))
            }
            Domain::Categorical { values } => values.get(i).map(|s| Value::Cat(s.clone())),
            Domain::Real { .. } => None,
        }
    }

    /// Position of `v` in the domain's canonical order.
    pub fn position(&self, v: &Value) -> Option<usize> {
        match (self, v) {
            (Domain::Integer { lo, hi }, Value::Int(x)) if lo <= x && x <= hi => Some((*x - *lo) as usize),
            (Domain::Categorical { values }, Value::Cat(x)) => values.iter().position(|c| c == x),
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        !matches!(self, Domain::Categorical { .. })
    }

    /// Draws a value uniformly from the domain.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Value {
        match self {
            Domain::Integer { lo, hi } => Value::Int(rng.random_range(*lo..=*hi)),
            Domain::Categorical { values } => Value::Cat(values[rng.random_range(0..values.len())].clone()),
            Domain::Real { lo, hi } => {
                if lo == hi {
                    Value::Real(*lo)
                } else {
                    Value::Real(rng.random_range(*lo..=*hi))
                }
            }
        }
    }
}

/// Whether a provider may admit using a feature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    Legit,
    Discriminative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub domain: Domain,
    pub tag: Tag,
}

impl FeatureSpec {
    pub fn new(name: &str, domain: Domain, tag: Tag) -> Self {
        Self {
            name: name.to_owned(),
            domain,
            tag,
        }
    }

    pub fn legit(name: &str, domain: Domain) -> Self {
        Self::new(name, domain, Tag::Legit)
    }

    pub fn discriminative(name: &str, domain: Domain) -> Self {
        Self::new(name, domain, Tag::Discriminative)
    }
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    features: Vec<FeatureSpec>,
}

/// An ordered, validated list of features partitioned into legit and
/// discriminative parts. Must contain at least one legit feature.
#[derive(Clone, Debug)]
pub struct FeatureSpace {
    features: Vec<FeatureSpec>,
    by_name: HashMap<String, usize>,
    legit: Vec<usize>,
    discriminative: Vec<usize>,
}

impl PartialEq for FeatureSpace {
    fn eq(&self, other: &Self) -> bool {
        self.features == other.features
    }
}

impl Serialize for FeatureSpace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawSpace {
            features: self.features.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FeatureSpace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpace::deserialize(d)?;
        FeatureSpace::new(raw.features).map_err(serde::de::Error::custom)
    }
}

impl FeatureSpace {
    pub fn new(features: Vec<FeatureSpec>) -> Result<Self> {
        let mut by_name = HashMap::with_capacity(features.len());
        let mut legit = Vec::new();
        let mut discriminative = Vec::new();
        for (i, f) in features.iter().enumerate() {
            f.domain.validate(&f.name)?;
            if by_name.insert(f.name.clone(), i).is_some() {
                return Err(Error::InvalidSpace(format!(
                    "feature name `{}` is declared twice",
                    f.name
                )));
            }
            match f.tag {
                Tag::Legit => legit.push(i),
                Tag::Discriminative => discriminative.push(i),
            }
        }
        if legit.is_empty() {
            return Err(Error::InvalidSpace("at least one legit feature is required".into()));
        }
        Ok(Self {
            features,
            by_name,
            legit,
            discriminative,
        })
    }

    /// Parses a space from its TOML form (a `[[features]]` array).
    pub fn from_toml(doc: &str) -> Result<Self> {
        Ok(toml::from_str(doc)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&RawSpace {
            features: self.features.clone(),
        })
        .expect("feature spaces always serialize")
    }

    pub fn features(&self) -> &[FeatureSpec] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature(&self, i: usize) -> &FeatureSpec {
        &self.features[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownFeature(name.to_owned()))
    }

    pub fn legit_indices(&self) -> &[usize] {
        &self.legit
    }

    pub fn discriminative_indices(&self) -> &[usize] {
        &self.discriminative
    }

    pub fn is_discriminative(&self, i: usize) -> bool {
        self.features[i].tag == Tag::Discriminative
    }

    pub fn is_discriminative_name(&self, name: &str) -> Result<bool> {
        Ok(self.is_discriminative(self.require(name)?))
    }

    /// Validates `values` against the space, widening integers into real
    /// domains, and wraps them as an [`Instance`].
    pub fn instance(&self, values: Vec<Value>) -> Result<Instance> {
        if values.len() != self.features.len() {
            return Err(Error::Arity {
                expected: self.features.len(),
                found: values.len(),
            });
        }
        let values = values
            .into_iter()
            .zip(&self.features)
            .map(|(v, f)| {
                let v = match (&f.domain, v) {
                    (Domain::Real { .. }, Value::Int(i)) => Value::Real(i as f64),
                    (_, v) => v,
                };
                if f.domain.contains(&v) {
                    Ok(v)
                } else {
                    Err(Error::Domain {
                        feature: f.name.clone(),
                        value: v.to_string(),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance { values })
    }

    /// Checks that `x` conforms to the space.
    pub fn check(&self, x: &Instance) -> Result<()> {
        if x.values.len() != self.features.len() {
            return Err(Error::Arity {
                expected: self.features.len(),
                found: x.values.len(),
            });
        }
        for (v, f) in x.values.iter().zip(&self.features) {
            if !f.domain.contains(v) {
                return Err(Error::Domain {
                    feature: f.name.clone(),
                    value: v.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Builds an instance from a name → value map. Every feature must be
    /// present and no unknown names are accepted.
    pub fn instance_from_map(&self, map: &BTreeMap<String, Value>) -> Result<Instance> {
        if let Some(unknown) = map.keys().find(|k| !self.by_name.contains_key(*k)) {
            return Err(Error::UnknownFeature(unknown.clone()));
        }
        let values = self
            .features
            .iter()
            .map(|f| {
                map.get(&f.name)
                    .cloned()
                    .ok_or_else(|| Error::InvalidArgument(format!("missing value for feature `{}`", f.name)))
            })
            .collect::<Result<Vec<_>>>()?;
        self.instance(values)
    }

    pub fn to_map(&self, x: &Instance) -> BTreeMap<String, Value> {
        self.features
            .iter()
            .zip(&x.values)
            .map(|(f, v)| (f.name.clone(), v.clone()))
            .collect()
    }

    /// Splits `x` into its legit and discriminative parts, each in feature
    /// order.
    pub fn split_instance(&self, x: &Instance) -> Result<(Vec<Value>, Vec<Value>)> {
        self.check(x)?;
        Ok((self.legit_part(x), self.discriminative_part(x)))
    }

    /// Inverse of [`split_instance`](Self::split_instance).
    pub fn merge(&self, legit: &[Value], discriminative: &[Value]) -> Result<Instance> {
        if legit.len() != self.legit.len() || discriminative.len() != self.discriminative.len() {
            return Err(Error::Arity {
                expected: self.features.len(),
                found: legit.len() + discriminative.len(),
            });
        }
        let mut values = vec![Value::Int(0); self.features.len()];
        for (&i, v) in self.legit.iter().zip(legit) {
            values[i] = v.clone();
        }
        for (&i, v) in self.discriminative.iter().zip(discriminative) {
            values[i] = v.clone();
        }
        self.instance(values)
    }

    /// Legit values of `x` in feature order. This is the grouping key used
    /// for incoherent-pair detection.
    pub fn legit_part(&self, x: &Instance) -> Vec<Value> {
        self.legit.iter().map(|&i| x.values[i].clone()).collect()
    }

    pub fn discriminative_part(&self, x: &Instance) -> Vec<Value> {
        self.discriminative.iter().map(|&i| x.values[i].clone()).collect()
    }

    /// Number of joint assignments of the features in `indices`.
    pub fn count_assignments(&self, indices: &[usize]) -> Result<u128> {
        indices.iter().try_fold(1u128, |acc, &i| {
            let f = &self.features[i];
            let card = f
                .domain
                .cardinality()
                .ok_or_else(|| Error::UnsupportedDomain(f.name.clone()))?;
            Ok(acc.saturating_mul(card))
        })
    }

    /// All joint assignments of the features in `indices`, in mixed-radix
    /// order with the last feature varying fastest.
    pub fn assignments(&self, indices: &[usize]) -> Result<Vec<Vec<Value>>> {
        let total = self.count_assignments(indices)?;
        if total > MAX_ENUMERATION {
            return Err(Error::Capacity {
                what: "assignment enumeration",
                needed: total,
                limit: MAX_ENUMERATION,
            });
        }
        let domains: Vec<Vec<Value>> = indices
            .iter()
            .map(|&i| {
                let d = &self.features[i].domain;
                (0..d.cardinality().unwrap_or(0) as usize)
                    .filter_map(|k| d.value_at(k))
                    .collect()
            })
            .collect();
        let mut out = Vec::with_capacity(total as usize);
        let mut cursor = vec![0usize; indices.len()];
        for _ in 0..total {
            out.push(cursor.iter().zip(&domains).map(|(&c, d)| d[c].clone()).collect());
            for pos in (0..cursor.len()).rev() {
                cursor[pos] += 1;
                if cursor[pos] < domains[pos].len() {
                    break;
                }
                cursor[pos] = 0;
            }
        }
        Ok(out)
    }

    /// Index of an assignment of the features in `indices` within the order
    /// produced by [`assignments`](Self::assignments).
    pub fn assignment_index(&self, indices: &[usize], values: &[Value]) -> Option<usize> {
        let mut idx = 0usize;
        for (&i, v) in indices.iter().zip(values) {
            let d = &self.features[i].domain;
            let card = d.cardinality()? as usize;
            idx = idx * card + d.position(v)?;
        }
        Some(idx)
    }

    /// Every instance of the space, in assignment order.
    pub fn all_instances(&self) -> Result<Vec<Instance>> {
        let all: Vec<usize> = (0..self.features.len()).collect();
        Ok(self
            .assignments(&all)?
            .into_iter()
            .map(|values| Instance { values })
            .collect())
    }
}

/// Feature values laid out in the order of a [`FeatureSpace`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Instance {
    values: Vec<Value>,
}

impl Instance {
    /// Wraps values without validation. Prefer [`FeatureSpace::instance`].
    pub fn from_values_unchecked(values: Vec<Value>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn get(&self, i: usize) -> &Value {
        &self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Copy of `self` with feature `i` replaced by `v`.
    pub fn with(&self, i: usize, v: Value) -> Self {
        let mut values = self.values.clone();
        values[i] = v;
        Self { values }
    }

    pub fn into_values(self) -> Vec<Value> {
        self.values
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Binary decision. Serialized as `0` or `1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Zero,
    One,
}

impl Label {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Label::One
        } else {
            Label::Zero
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Label::Zero => 0,
            Label::One => 1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Label::Zero => Label::One,
            Label::One => Label::Zero,
        }
    }

    pub fn try_from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Label::Zero),
            1 => Some(Label::One),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = u8::deserialize(d)?;
        Label::try_from_u8(v).ok_or_else(|| serde::de::Error::custom(format!("label must be 0 or 1, got {v}")))
    }
}
