//! The club-bouncer example: a door policy that secretly tests age.
//!
//! ```text
//!               disguised = yes?
//!              Y /            \ N
//!        age <= 59.5      socks = pink?
//!        Y /    \ N        Y /    \ N
//!      Enter  Bounce     Enter  Bounce
//! ```
//!
//! `Enter` is label 1 and `Bounce` label 0.

use crate::space::{Domain, FeatureSpace, FeatureSpec, Label};

use super::{DecisionTree, Node, Predicate};

pub const ENTER: Label = Label::One;
pub const BOUNCE: Label = Label::Zero;

pub fn space() -> FeatureSpace {
    FeatureSpace::new(vec![
        FeatureSpec::legit(
            "disguised",
            Domain::Categorical {
                values: vec!["yes".into(), "no".into()],
            },
        ),
        FeatureSpec::legit(
            "socks",
            Domain::Categorical {
                values: vec!["pink".into(), "plain".into()],
            },
        ),
        FeatureSpec::discriminative("age", Domain::Integer { lo: 18, hi: 100 }),
    ])
    .expect("bouncer space is valid")
}

fn socks_subtree() -> Node {
    Node::split(
        Predicate::is_in("socks", ["pink"]),
        Node::leaf(ENTER),
        Node::leaf(BOUNCE),
    )
}

/// The discriminating door policy.
pub fn tree() -> DecisionTree {
    let root = Node::split(
        Predicate::is_in("disguised", ["yes"]),
        Node::split(Predicate::le("age", 59.5), Node::leaf(ENTER), Node::leaf(BOUNCE)),
        socks_subtree(),
    );
    DecisionTree::new(space(), root).expect("bouncer tree is valid")
}

/// The surrogate served to a visitor younger than 60: the age test is
/// replaced by its `Enter` outcome.
pub fn surrogate_under_60() -> DecisionTree {
    let root = Node::split(
        Predicate::is_in("disguised", ["yes"]),
        Node::leaf(ENTER),
        socks_subtree(),
    );
    DecisionTree::new(space(), root).expect("surrogate is valid")
}

/// The surrogate served to a visitor aged 60 or more.
pub fn surrogate_60_and_over() -> DecisionTree {
    let root = Node::split(
        Predicate::is_in("disguised", ["yes"]),
        Node::leaf(BOUNCE),
        socks_subtree(),
    );
    DecisionTree::new(space(), root).expect("surrogate is valid")
}
