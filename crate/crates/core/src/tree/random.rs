//! Random small spaces and trees, for property checks and benchmarks.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::space::{Domain, FeatureSpace, FeatureSpec, Label};

use super::{DecisionTree, Node, Predicate};

/// A space of 2 to `max_features` features with small integer or
/// categorical domains, at least one legit and, when possible, at least one
/// discriminative feature.
pub fn random_space<R: Rng + ?Sized>(rng: &mut R, max_features: usize) -> FeatureSpace {
    let n = rng.random_range(2..=max_features.max(2));
    let legit_anchor = rng.random_range(0..n);
    let disc_anchor = (legit_anchor + rng.random_range(1..n)) % n;
    let specs = (0..n)
        .map(|i| {
            let name = format!("f{i}");
            let domain = if rng.random_bool(0.5) {
                Domain::Integer {
                    lo: 0,
                    hi: rng.random_range(1..=3),
                }
            } else {
                let k = rng.random_range(2..=3);
                Domain::Categorical {
                    values: (0..k).map(|v| format!("v{v}")).collect(),
                }
            };
            let legit = i == legit_anchor || (i != disc_anchor && rng.random_bool(0.5));
            if legit {
                FeatureSpec::legit(&name, domain)
            } else {
                FeatureSpec::discriminative(&name, domain)
            }
        })
        .collect();
    FeatureSpace::new(specs).expect("generated space is valid")
}

fn random_predicate<R: Rng + ?Sized>(space: &FeatureSpace, rng: &mut R) -> Predicate {
    let f = space.feature(rng.random_range(0..space.len()));
    match &f.domain {
        Domain::Integer { lo, hi } => {
            let t = rng.random_range(*lo..*hi) as f64 + 0.5;
            Predicate::le(&f.name, t)
        }
        Domain::Real { lo, hi } => Predicate::le(&f.name, rng.random_range(*lo..*hi)),
        Domain::Categorical { values } => {
            let k = rng.random_range(1..values.len());
            let chosen: BTreeSet<&str> = values.choose_multiple(rng, k).map(String::as_str).collect();
            Predicate::is_in(&f.name, chosen)
        }
    }
}

fn random_node<R: Rng + ?Sized>(space: &FeatureSpace, depth: usize, rng: &mut R) -> Node {
    if depth == 0 || rng.random_bool(0.25) {
        return Node::leaf(Label::from_bool(rng.random_bool(0.5)));
    }
    let p = random_predicate(space, rng);
    Node::split(
        p,
        random_node(space, depth - 1, rng),
        random_node(space, depth - 1, rng),
    )
}

/// A tree of depth at most `max_depth` with random tests over `space`.
/// Domains must have at least two values.
pub fn random_tree<R: Rng + ?Sized>(space: &FeatureSpace, max_depth: usize, rng: &mut R) -> DecisionTree {
    DecisionTree::new(space.clone(), random_node(space, max_depth, rng)).expect("generated tree is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_trees_are_valid_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..200 {
            let space = random_space(&mut rng, 4);
            assert!(!space.legit_indices().is_empty());
            assert!(!space.discriminative_indices().is_empty());
            let t = random_tree(&space, 5, &mut rng);
            assert!(t.depth() <= 5);
            let json = t.to_json_pretty();
            assert_eq!(DecisionTree::from_json(&json).unwrap(), t);
        }
    }
}
