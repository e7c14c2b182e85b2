//! The classifier abstraction, the Dirac surrogate, and brute-force oracles
//! over small enumerable spaces.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{FeatureSpace, Instance, Label, Value, MAX_ENUMERATION};

/// Largest legit assignment count for which classifier tabulation is allowed.
pub const MAX_TABULATED_ASSIGNMENTS: u128 = 20;

/// A total, deterministic binary decision function over conforming
/// instances.
pub trait Classifier: Send + Sync {
    fn classify(&self, x: &Instance) -> Label;
}

impl<C: Classifier + ?Sized> Classifier for &C {
    fn classify(&self, x: &Instance) -> Label {
        (**self).classify(x)
    }
}

impl<C: Classifier + ?Sized> Classifier for Box<C> {
    fn classify(&self, x: &Instance) -> Label {
        (**self).classify(x)
    }
}

impl<C: Classifier + ?Sized> Classifier for Arc<C> {
    fn classify(&self, x: &Instance) -> Label {
        (**self).classify(x)
    }
}

/// Always returns the same label.
#[derive(Clone, Copy, Debug)]
pub struct Constant(pub Label);

impl Classifier for Constant {
    fn classify(&self, _: &Instance) -> Label {
        self.0
    }
}

/// Adapts a closure into a classifier.
pub struct FnClassifier<F>(pub F);

impl<F> Classifier for FnClassifier<F>
where
    F: Fn(&Instance) -> Label + Send + Sync,
{
    fn classify(&self, x: &Instance) -> Label {
        (self.0)(x)
    }
}

/// A classifier given by an explicit truth table over a subset of features.
///
/// Entry `k` of the table is the label of the `k`-th assignment of `over`, in
/// the order of [`FeatureSpace::assignments`]. Features outside `over` are
/// ignored.
#[derive(Clone, Debug)]
pub struct Tabulated<'a> {
    space: &'a FeatureSpace,
    over: Vec<usize>,
    table: Vec<Label>,
}

impl<'a> Tabulated<'a> {
    pub fn new(space: &'a FeatureSpace, over: Vec<usize>, table: Vec<Label>) -> Result<Self> {
        let expected = space.count_assignments(&over)?;
        if expected != table.len() as u128 {
            return Err(Error::InvalidArgument(format!(
                "truth table has {} rows, the features span {expected} assignments",
                table.len()
            )));
        }
        Ok(Self { space, over, table })
    }

    /// Tabulates a function over every feature of the space, with the rows
    /// taken from the low bits of `bits` (row `k` is bit `k`).
    pub fn over_all_from_bits(space: &'a FeatureSpace, bits: u64) -> Result<Self> {
        let over: Vec<usize> = (0..space.len()).collect();
        let n = space.count_assignments(&over)?;
        if n > 64 {
            return Err(Error::Capacity {
                what: "bit-packed truth table",
                needed: n,
                limit: 64,
            });
        }
        let table = (0..n as usize).map(|k| Label::from_bool(bits >> k & 1 == 1)).collect();
        Self::new(space, over, table)
    }

    pub fn table(&self) -> &[Label] {
        &self.table
    }

    /// The pointwise negation of this classifier.
    pub fn negated(&self) -> Self {
        Self {
            space: self.space,
            over: self.over.clone(),
            table: self.table.iter().map(|l| l.flip()).collect(),
        }
    }

    fn row_of(&self, x: &Instance) -> Option<usize> {
        let values: Vec<Value> = self.over.iter().map(|&i| x.get(i).clone()).collect();
        self.space.assignment_index(&self.over, &values)
    }
}

impl Classifier for Tabulated<'_> {
    fn classify(&self, x: &Instance) -> Label {
        let row = self.row_of(x);
        debug_assert!(row.is_some(), "instance does not conform to the table");
        row.map_or(Label::Zero, |r| self.table[r])
    }
}

/// The degenerate legitimate surrogate that agrees with decision `y` exactly
/// on the queried legit point and answers the opposite everywhere else.
#[derive(Clone, Debug)]
pub struct DiracSurrogate {
    legit: Vec<usize>,
    point: Vec<Value>,
    decision: Label,
}

impl DiracSurrogate {
    pub fn new(space: &FeatureSpace, x: &Instance, y: Label) -> Result<Self> {
        space.check(x)?;
        Ok(Self {
            legit: space.legit_indices().to_vec(),
            point: space.legit_part(x),
            decision: y,
        })
    }

    pub fn decision(&self) -> Label {
        self.decision
    }

    /// Legit feature indices and the values the surrogate singles out.
    pub fn point(&self) -> impl Iterator<Item = (usize, &Value)> {
        self.legit.iter().copied().zip(&self.point)
    }
}

impl Classifier for DiracSurrogate {
    fn classify(&self, x: &Instance) -> Label {
        let hit = self.legit.iter().zip(&self.point).all(|(&i, v)| x.get(i) == v);
        if hit {
            self.decision
        } else {
            self.decision.flip()
        }
    }
}

/// Builds the Dirac surrogate for decision `y` at `x`.
pub fn dirac_surrogate(x: &Instance, y: Label, space: &FeatureSpace) -> Result<DiracSurrogate> {
    DiracSurrogate::new(space, x, y)
}

fn check_enumerable(space: &FeatureSpace) -> Result<u128> {
    let all: Vec<usize> = (0..space.len()).collect();
    let n = space.count_assignments(&all)?;
    if n > MAX_ENUMERATION {
        return Err(Error::Capacity {
            what: "exhaustive legitimacy check",
            needed: n,
            limit: MAX_ENUMERATION,
        });
    }
    Ok(n)
}

/// Exhaustively decides whether `c` ignores every discriminative feature.
pub fn is_legitimate<C: Classifier + ?Sized>(c: &C, space: &FeatureSpace) -> Result<bool> {
    check_enumerable(space)?;
    let legit = space.assignments(space.legit_indices())?;
    let disc = space.assignments(space.discriminative_indices())?;
    for xl in &legit {
        let mut first = None;
        for xd in &disc {
            let y = c.classify(&space.merge(xl, xd)?);
            match first {
                None => first = Some(y),
                Some(f) if f != y => return Ok(false),
                Some(_) => {}
            }
        }
    }
    Ok(true)
}

/// Yields every function from legit assignments to labels, as truth tables
/// indexed by legit-assignment order. Table `m` has row `k` set to bit `k`
/// of `m`.
pub fn enumerate_legit_classifiers(space: &FeatureSpace) -> Result<impl Iterator<Item = Tabulated<'_>> + '_> {
    let over = space.legit_indices().to_vec();
    let rows = space.count_assignments(&over)?;
    if rows == 0 {
        return Err(Error::InvalidArgument("no legit assignments".into()));
    }
    if rows > MAX_TABULATED_ASSIGNMENTS {
        return Err(Error::Capacity {
            what: "legit classifier enumeration",
            needed: rows,
            limit: MAX_TABULATED_ASSIGNMENTS,
        });
    }
    let rows = rows as usize;
    Ok((0u64..1 << rows).map(move |mask| Tabulated {
        space,
        over: over.clone(),
        table: (0..rows).map(|k| Label::from_bool(mask >> k & 1 == 1)).collect(),
    }))
}

/// Counts the legit classifiers coherent with decision `y` at `x`, returning
/// `(coherent, total)`.
pub fn count_pr_functions(space: &FeatureSpace, x: &Instance, y: Label) -> Result<(u64, u64)> {
    space.check(x)?;
    let mut pr = 0u64;
    let mut total = 0u64;
    for c in enumerate_legit_classifiers(space)? {
        total += 1;
        if c.classify(x) == y {
            pr += 1;
        }
    }
    Ok((pr, total))
}
