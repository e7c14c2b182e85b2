//! Explanation laundering on remote classifiers, and what a user can do
//! about it.
//!
//! A provider that must not use some features (age, sex, ...) can still
//! serve a discriminative model while returning, for every query, the
//! explanation of a *legitimate* surrogate that agrees with the real model
//! on that one input. Single explanations then look clean. The defense is
//! to look across queries: two inputs that agree on all legit features but
//! receive different decisions (an *incoherent pair*) prove the model is
//! discriminative.
//!
//! - [`space`] and [`classifier`]: feature spaces split into legit and
//!   discriminative parts, classifiers, legitimacy, Dirac surrogates.
//! - [`tree`]: decision trees, path explanations, CART training and the
//!   surrogate-building prune.
//! - [`explain`]: the checks a user can run on a single explanation.
//! - [`audit`]: incoherent-pair search and confidence arithmetic.
//! - [`dimpact`]: incoherent-pair probability under group disparity.
//! - [`credit`]: the German Credit network experiment.
//! - [`dataset`]: headered CSV files over a feature space.

pub mod audit;
pub mod classifier;
pub mod credit;
pub mod dataset;
pub mod dimpact;
pub mod error;
pub mod explain;
pub mod space;
pub mod tree;

pub use audit::{AuditReport, IncoherentPair, Oracle, OracleError, QueryRecord, QueryScheduler};
pub use classifier::{dirac_surrogate, is_legitimate, Classifier, DiracSurrogate};
pub use error::{Error, Result};
pub use explain::{is_apropos, is_consequent, mentions_discriminative, Explanation, OrientedPredicate};
pub use space::{Domain, FeatureSpace, FeatureSpec, Instance, Label, Tag, Value};
pub use tree::{pr_attack_prune, DecisionTree, Node, Predicate};
