//! Binary decision trees with single-feature tests.
//!
//! A tree is both a classifier and the carrier of its own explanations: the
//! path an instance follows lists every test that led to the decision.

mod attack;
pub mod bouncer;
mod predicate;
pub mod random;
mod train;

use serde::{Deserialize, Deserializer, Serialize};

use crate::classifier::Classifier;
use crate::error::Result;
use crate::explain::{Explanation, OrientedPredicate, Provenance};
use crate::space::{FeatureSpace, Instance, Label};

pub use attack::{pr_attack_prune, pr_attack_prune_with, PruneMode};
pub use predicate::{Predicate, Test};
pub use train::{train, Impurity, TrainConfig};

/// A tree node. Internal nodes have exactly two children: `yes` is taken
/// when the predicate holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf(Label),
    Split(Box<Split>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Split {
    #[serde(flatten)]
    pub predicate: Predicate,
    pub yes: Node,
    pub no: Node,
    #[serde(skip)]
    index: usize,
}

impl PartialEq for Split {
    fn eq(&self, other: &Self) -> bool {
        self.predicate == other.predicate && self.yes == other.yes && self.no == other.no
    }
}

impl Node {
    pub fn leaf(label: Label) -> Self {
        Node::Leaf(label)
    }

    /// Builds an unresolved split; [`DecisionTree::new`] resolves it.
    pub fn split(predicate: Predicate, yes: Node, no: Node) -> Self {
        Node::Split(Box::new(Split {
            predicate,
            yes,
            no,
            index: usize::MAX,
        }))
    }

    pub fn node_count(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Split(s) => 1 + s.yes.node_count() + s.no.node_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Split(s) => 1 + s.yes.depth().max(s.no.depth()),
        }
    }

    fn resolve(&mut self, space: &FeatureSpace) -> Result<()> {
        if let Node::Split(s) = self {
            s.index = s.predicate.resolve(space)?;
            s.yes.resolve(space)?;
            s.no.resolve(space)?;
        }
        Ok(())
    }

    fn any_predicate(&self, f: &mut impl FnMut(&Split) -> bool) -> bool {
        match self {
            Node::Leaf(_) => false,
            Node::Split(s) => f(s) || s.yes.any_predicate(f) || s.no.any_predicate(f),
        }
    }
}

impl Split {
    /// Feature index the predicate tests.
    pub fn feature_index(&self) -> usize {
        self.index
    }

    pub(crate) fn branch(&self, x: &Instance) -> bool {
        self.predicate.eval(x.get(self.index))
    }

    pub(crate) fn child(&self, taken: bool) -> &Node {
        if taken {
            &self.yes
        } else {
            &self.no
        }
    }
}

/// A validated decision tree over a feature space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecisionTree {
    space: FeatureSpace,
    root: Node,
}

#[derive(Deserialize)]
struct RawTree {
    space: FeatureSpace,
    root: Node,
}

impl<'de> Deserialize<'de> for DecisionTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawTree::deserialize(d)?;
        DecisionTree::new(raw.space, raw.root).map_err(serde::de::Error::custom)
    }
}

impl DecisionTree {
    /// Validates every predicate against `space`.
    pub fn new(space: FeatureSpace, mut root: Node) -> Result<Self> {
        root.resolve(&space)?;
        Ok(Self { space, root })
    }

    pub fn from_json(doc: &str) -> Result<Self> {
        Ok(serde_json::from_str(doc)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("trees always serialize")
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn predict(&self, x: &Instance) -> Result<Label> {
        self.space.check(x)?;
        Ok(self.eval(x))
    }

    fn eval(&self, x: &Instance) -> Label {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf(l) => return *l,
                Node::Split(s) => node = s.child(s.branch(x)),
            }
        }
    }

    /// The oriented tests along the evaluation path of `x`, ending in the
    /// predicted label.
    pub fn path_explanation(&self, x: &Instance) -> Result<Explanation> {
        self.space.check(x)?;
        let mut predicates = Vec::new();
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf(l) => {
                    return Ok(Explanation::new(predicates, *l, Provenance::Honest));
                }
                Node::Split(s) => {
                    let taken = s.branch(x);
                    predicates.push(OrientedPredicate::new(s.predicate.clone(), taken));
                    node = s.child(taken);
                }
            }
        }
    }

    /// Syntactic check: does any node test a discriminative feature?
    pub fn uses_discriminative(&self) -> bool {
        let space = &self.space;
        self.root.any_predicate(&mut |s| space.is_discriminative(s.index))
    }

    pub(crate) fn from_parts_unchecked(space: FeatureSpace, root: Node) -> Self {
        Self { space, root }
    }
}

impl Classifier for DecisionTree {
    fn classify(&self, x: &Instance) -> Label {
        self.eval(x)
    }
}

/// Free-function form of [`DecisionTree::uses_discriminative`], checked
/// against an explicit space.
pub fn uses_discriminative(t: &DecisionTree, space: &FeatureSpace) -> bool {
    t.root.any_predicate(&mut |s| {
        space
            .index_of(&s.predicate.feature)
            .is_some_and(|i| space.is_discriminative(i))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::is_legitimate;
    use crate::error::Error;
    use crate::space::{Domain, FeatureSpec, Value};

    fn x(disguised: &str, socks: &str, age: i64) -> Instance {
        bouncer::space()
            .instance(vec![disguised.into(), socks.into(), age.into()])
            .unwrap()
    }

    #[test]
    fn bouncer_predictions() {
        let t = bouncer::tree();
        assert_eq!(t.predict(&x("yes", "pink", 49)).unwrap(), Label::One);
        assert_eq!(t.predict(&x("yes", "pink", 62)).unwrap(), Label::Zero);
        assert_eq!(t.predict(&x("no", "pink", 62)).unwrap(), Label::One);
        assert_eq!(t.predict(&x("no", "plain", 30)).unwrap(), Label::Zero);
    }

    #[test]
    fn single_leaf_tree() {
        let t = DecisionTree::new(bouncer::space(), Node::leaf(Label::One)).unwrap();
        for xi in bouncer::space().all_instances().unwrap() {
            assert_eq!(t.predict(&xi).unwrap(), Label::One);
        }
        let a = t.path_explanation(&x("no", "pink", 20)).unwrap();
        assert!(a.predicates.is_empty());
        assert_eq!(a.label, Label::One);
    }

    #[test]
    fn bouncer_path_explanation() {
        let t = bouncer::tree();
        let a = t.path_explanation(&x("yes", "pink", 49)).unwrap();
        assert_eq!(
            a.predicates,
            vec![
                OrientedPredicate::new(Predicate::is_in("disguised", ["yes"]), true),
                OrientedPredicate::new(Predicate::le("age", 59.5), true),
            ]
        );
        assert_eq!(a.label, Label::One);
        assert_eq!(a.to_string(), "[disguised = yes, age <= 59.5] => 1");
    }

    #[test]
    fn rejects_predicates_outside_the_space() {
        let bad = Node::split(
            Predicate::le("height", 1.0),
            Node::leaf(Label::One),
            Node::leaf(Label::Zero),
        );
        assert!(matches!(
            DecisionTree::new(bouncer::space(), bad),
            Err(Error::UnknownFeature(_))
        ));
        let wrong_kind = Node::split(
            Predicate::le("disguised", 1.0),
            Node::leaf(Label::One),
            Node::leaf(Label::Zero),
        );
        assert!(DecisionTree::new(bouncer::space(), wrong_kind).is_err());
        let out_of_range = Node::split(
            Predicate::le("age", 500.0),
            Node::leaf(Label::One),
            Node::leaf(Label::Zero),
        );
        assert!(DecisionTree::new(bouncer::space(), out_of_range).is_err());
    }

    #[test]
    fn predict_checks_conformance() {
        let t = bouncer::tree();
        let bad = Instance::from_values_unchecked(vec![Value::cat("yes")]);
        assert!(t.predict(&bad).is_err());
    }

    #[test]
    fn syntactic_versus_semantic_legitimacy() {
        let t = bouncer::tree();
        assert!(t.uses_discriminative());
        assert!(uses_discriminative(&t, t.space()));

        // Tests age, but both outcomes agree.
        let dummy = DecisionTree::new(
            bouncer::space(),
            Node::split(
                Predicate::le("age", 40.0),
                Node::leaf(Label::One),
                Node::leaf(Label::One),
            ),
        )
        .unwrap();
        assert!(dummy.uses_discriminative());
        assert!(is_legitimate(&dummy, dummy.space()).unwrap());
        assert!(!is_legitimate(&t, t.space()).unwrap());
    }

    #[test]
    fn json_round_trip_resolves_indices() {
        let t = bouncer::tree();
        let back = DecisionTree::from_json(&t.to_json_pretty()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.predict(&x("yes", "pink", 62)).unwrap(), Label::Zero);
    }

    #[test]
    fn real_valued_features() {
        let space = FeatureSpace::new(vec![
            FeatureSpec::legit("score", Domain::Real { lo: 0.0, hi: 1.0 }),
            FeatureSpec::discriminative("g", Domain::Integer { lo: 0, hi: 1 }),
        ])
        .unwrap();
        let t = DecisionTree::new(
            space.clone(),
            Node::split(
                Predicate::le("score", 0.5),
                Node::leaf(Label::Zero),
                Node::leaf(Label::One),
            ),
        )
        .unwrap();
        let xi = space.instance(vec![0.75.into(), 1i64.into()]).unwrap();
        assert_eq!(t.predict(&xi).unwrap(), Label::One);
    }
}
