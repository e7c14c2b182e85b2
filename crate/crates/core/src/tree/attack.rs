//! Per-query surrogate construction by splicing out discriminative tests.

use crate::error::Result;
use crate::space::{FeatureSpace, Instance, Label};

use super::{DecisionTree, Node, Split};

/// How legit nodes are treated when building the surrogate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PruneMode {
    /// Replace every discriminative node (on or off the path of `x`) with the
    /// child selected by `x`'s discriminative values; leave legit nodes
    /// untouched. The surrogate then satisfies
    /// `C'(x'_l) = C((x'_l, x_d))` for every legit assignment `x'_l`.
    #[default]
    PartialEvaluation,
    /// Follow only the path of `x`: splice out discriminative nodes on the
    /// path and replace every untaken legit branch by a leaf carrying the
    /// opposite of the decision. Coherent and legitimate, but it does not
    /// preserve the original behavior elsewhere.
    PathOnly,
}

/// Builds the surrogate tree served alongside `t`'s decision on `x`.
pub fn pr_attack_prune(t: &DecisionTree, x: &Instance) -> Result<DecisionTree> {
    pr_attack_prune_with(t, x, PruneMode::PartialEvaluation)
}

pub fn pr_attack_prune_with(t: &DecisionTree, x: &Instance, mode: PruneMode) -> Result<DecisionTree> {
    let space = t.space();
    let y = t.predict(x)?;
    let root = match mode {
        PruneMode::PartialEvaluation => partial_eval(t.root(), x, space),
        PruneMode::PathOnly => path_only(t.root(), x, space, y.flip()),
    };
    Ok(DecisionTree::from_parts_unchecked(space.clone(), root))
}

fn partial_eval(node: &Node, x: &Instance, space: &FeatureSpace) -> Node {
    match node {
        Node::Leaf(l) => Node::Leaf(*l),
        Node::Split(s) if space.is_discriminative(s.index) => partial_eval(s.child(s.branch(x)), x, space),
        Node::Split(s) => Node::Split(Box::new(Split {
            predicate: s.predicate.clone(),
            yes: partial_eval(&s.yes, x, space),
            no: partial_eval(&s.no, x, space),
            index: s.index,
        })),
    }
}

fn path_only(node: &Node, x: &Instance, space: &FeatureSpace, dummy: Label) -> Node {
    match node {
        Node::Leaf(l) => Node::Leaf(*l),
        Node::Split(s) => {
            let taken = s.branch(x);
            let next = path_only(s.child(taken), x, space, dummy);
            if space.is_discriminative(s.index) {
                return next;
            }
            let (yes, no) = if taken {
                (next, Node::Leaf(dummy))
            } else {
                (Node::Leaf(dummy), next)
            };
            Node::Split(Box::new(Split {
                predicate: s.predicate.clone(),
                yes,
                no,
                index: s.index,
            }))
        }
    }
}
