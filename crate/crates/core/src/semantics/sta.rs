use std::fmt;

use serde::{Deserialize, Serialize};

use crate::tree::{Activity, Label, NodeId, Operator, ProcessTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cardinality {
    Zero,
    One,
    Many,
}

impl Cardinality {
    fn bit(self) -> u8 {
        match self {
            Cardinality::Zero => 1,
            Cardinality::One => 2,
            Cardinality::Many => 4,
        }
    }

    /// Abstraction of an occurrence count.
    pub fn of_count(n: usize) -> Self {
        match n {
            0 => Cardinality::Zero,
            1 => Cardinality::One,
            _ => Cardinality::Many,
        }
    }
}

/// A subset of {zero, one, many}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CardinalitySet(u8);

impl CardinalitySet {
    pub const EMPTY: CardinalitySet = CardinalitySet(0);
    pub const ONE: CardinalitySet = CardinalitySet(2);
    pub const ZERO_ONE: CardinalitySet = CardinalitySet(3);
    pub const ONE_MANY: CardinalitySet = CardinalitySet(6);
    pub const ZERO_MANY: CardinalitySet = CardinalitySet(5);

    pub fn of(items: &[Cardinality]) -> Self {
        CardinalitySet(items.iter().fold(0, |acc, c| acc | c.bit()))
    }

    pub fn contains(self, c: Cardinality) -> bool {
        self.0 & c.bit() != 0
    }

    pub fn insert(&mut self, c: Cardinality) {
        self.0 |= c.bit();
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersection(self, other: CardinalitySet) -> CardinalitySet {
        CardinalitySet(self.0 & other.0)
    }

    pub fn union(self, other: CardinalitySet) -> CardinalitySet {
        CardinalitySet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = Cardinality> {
        [Cardinality::Zero, Cardinality::One, Cardinality::Many].into_iter().filter(move |&c| self.contains(c))
    }

    /// Saturating sum: every `a + b` with `a ∈ self`, `b ∈ other`.
    fn add(self, other: CardinalitySet) -> CardinalitySet {
        let mut out = CardinalitySet::EMPTY;
        for a in self.iter() {
            for b in other.iter() {
                out.insert(Cardinality::of_count(count(a) + count(b)));
            }
        }
        out
    }
}

fn count(c: Cardinality) -> usize {
    match c {
        Cardinality::Zero => 0,
        Cardinality::One => 1,
        Cardinality::Many => 2,
    }
}

impl fmt::Display for CardinalitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self
            .iter()
            .map(|c| match c {
                Cardinality::Zero => "0",
                Cardinality::One => "1",
                Cardinality::Many => "∞",
            })
            .collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

impl fmt::Debug for CardinalitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// For how many occurrences `k` of `label` there is a trace in 𝓛(t)
/// containing exactly `k` of them (`many` meaning `k ≥ 2`).
///
/// Computed structurally over the abstract domain {0, 1, ≥2}, where
/// saturating addition commutes with the abstraction, so the result is
/// exact rather than an interval over-approximation.
pub fn sta(t: &ProcessTree, label: &Activity) -> CardinalitySet {
    sta_at(t, t.root(), label)
}

fn sta_at(t: &ProcessTree, v: NodeId, label: &Activity) -> CardinalitySet {
    match t.label(v) {
        Label::Activity(a) if a == label => CardinalitySet::ONE,
        Label::Activity(_) | Label::Tau => CardinalitySet::of(&[Cardinality::Zero]),
        Label::Operator(op) => {
            let kids: Vec<CardinalitySet> = t.children(v).iter().map(|&c| sta_at(t, c, label)).collect();
            match op {
                Operator::Sequence | Operator::Parallel => kids
                    .into_iter()
                    .fold(CardinalitySet::of(&[Cardinality::Zero]), CardinalitySet::add),
                Operator::Choice => kids.into_iter().fold(CardinalitySet::EMPTY, CardinalitySet::union),
                Operator::Loop => {
                    let (body, redo) = (kids[0], kids[1]);
                    let step = redo.add(body);
                    let mut reach = body;
                    loop {
                        let next = reach.union(reach.add(step));
                        if next == reach {
                            return reach;
                        }
                        reach = next;
                    }
                }
            }
        }
    }
}
