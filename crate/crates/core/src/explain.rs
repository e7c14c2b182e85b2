//! Explanations and the checks a remote user can run on them.
//!
//! An explanation is a conjunction of oriented predicates together with the
//! label it claims to justify. A user who only sees their own query can
//! check three things: that every predicate holds on their input
//! (apropos), that the label matches the decision they received
//! (consequent), and whether any predicate names a discriminative feature.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classifier::DiracSurrogate;
use crate::error::{Error, Result};
use crate::space::{FeatureSpace, Instance, Label};
use crate::tree::{Predicate, Test};

/// Server-side record of how an explanation was produced. Never sent on the
/// wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Honest,
    Surrogate,
}

/// A predicate together with the branch that was taken.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientedPredicate {
    #[serde(flatten)]
    pub predicate: Predicate,
    pub branch: bool,
}

impl OrientedPredicate {
    pub fn new(predicate: Predicate, branch: bool) -> Self {
        Self { predicate, branch }
    }

    /// Whether the predicate, with its recorded orientation, holds on `x`.
    pub fn holds(&self, space: &FeatureSpace, x: &Instance) -> Result<bool> {
        let idx = space
            .index_of(&self.predicate.feature)
            .ok_or_else(|| Error::MalformedExplanation(format!("unknown feature `{}`", self.predicate.feature)))?;
        Ok(self.predicate.eval(x.get(idx)) == self.branch)
    }
}

impl fmt::Display for OrientedPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.branch {
            return write!(f, "{}", self.predicate);
        }
        let p = &self.predicate;
        match &p.test {
            Test::Le(t) => write!(f, "{} > {}", p.feature, t),
            Test::In(set) if set.len() == 1 => {
                write!(f, "{} != {}", p.feature, set.iter().next().unwrap())
            }
            Test::In(set) => {
                let items: Vec<&str> = set.iter().map(String::as_str).collect();
                write!(f, "{} not in {{{}}}", p.feature, items.join(", "))
            }
            Test::Eq(v) => write!(f, "{} != {}", p.feature, v),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Explanation {
    pub predicates: Vec<OrientedPredicate>,
    pub label: Label,
    #[serde(skip)]
    pub provenance: Option<Provenance>,
}

impl PartialEq for Explanation {
    fn eq(&self, other: &Self) -> bool {
        self.predicates == other.predicates && self.label == other.label
    }
}

impl Explanation {
    pub fn new(predicates: Vec<OrientedPredicate>, label: Label, provenance: Provenance) -> Self {
        Self {
            predicates,
            label,
            provenance: Some(provenance),
        }
    }

    /// Strips server-side metadata.
    pub fn for_wire(&self) -> Self {
        Self {
            predicates: self.predicates.clone(),
            label: self.label,
            provenance: None,
        }
    }
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, p) in self.predicates.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "] => {}", self.label)
    }
}

/// True iff every predicate of `a` holds on `x`.
pub fn is_apropos(a: &Explanation, x: &Instance, space: &FeatureSpace) -> Result<bool> {
    space.check(x)?;
    for p in &a.predicates {
        if !p.holds(space, x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff `a` justifies the decision that was actually returned.
pub fn is_consequent(a: &Explanation, y: Label) -> bool {
    a.label == y
}

/// True iff some predicate of `a` names a discriminative feature.
pub fn mentions_discriminative(a: &Explanation, space: &FeatureSpace) -> bool {
    a.predicates.iter().any(|p| {
        space
            .index_of(&p.predicate.feature)
            .is_some_and(|i| space.is_discriminative(i))
    })
}

/// Renders "because it is specifically you": one equality per feature in
/// `indices`, all oriented true on `x`.
pub fn point_explanation(
    space: &FeatureSpace,
    x: &Instance,
    indices: &[usize],
    y: Label,
    provenance: Provenance,
) -> Explanation {
    let predicates = indices
        .iter()
        .map(|&i| OrientedPredicate::new(Predicate::eq(&space.feature(i).name, x.get(i).clone()), true))
        .collect();
    Explanation::new(predicates, y, provenance)
}

/// Explanation of a Dirac surrogate: equalities on the legit point only.
pub fn dirac_explanation(surrogate: &DiracSurrogate, space: &FeatureSpace) -> Explanation {
    let predicates = surrogate
        .point()
        .map(|(i, v)| OrientedPredicate::new(Predicate::eq(&space.feature(i).name, v.clone()), true))
        .collect();
    Explanation::new(predicates, surrogate.decision(), Provenance::Surrogate)
}
