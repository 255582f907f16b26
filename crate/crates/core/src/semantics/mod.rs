//! Execution semantics of process trees: running sequences, bounded
//! language enumeration, exact membership and label cardinality analysis.

pub mod machine;
mod sta;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::{self, AlignmentError, SearchOptions};
use crate::tree::{Activity, Label, NodeId, Operator, ProcessTree};

pub use sta::{sta, Cardinality, CardinalitySet};

/// Default cap on the number of enumerated sequences.
pub const DEFAULT_SEQUENCE_CAP: usize = 100_000;

/// A finite sequence of activities.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trace(Vec<Activity>);

impl Trace {
    pub fn new(activities: Vec<Activity>) -> Self {
        Trace(activities)
    }

    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Self {
        Trace(names.iter().map(|n| Activity::new(n.as_ref())).collect())
    }

    /// Splits on commas/whitespace: `"a,b,c"` or `"a b c"`.
    pub fn parse(text: &str) -> Self {
        Trace(
            text.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(Activity::new)
                .collect(),
        )
    }

    pub fn activities(&self) -> &[Activity] {
        &self.0
    }

    pub fn push(&mut self, a: Activity) {
        self.0.push(a);
    }

    pub fn into_inner(self) -> Vec<Activity> {
        self.0
    }
}

impl Deref for Trace {
    type Target = [Activity];

    fn deref(&self) -> &[Activity] {
        &self.0
    }
}

impl FromIterator<Activity> for Trace {
    fn from_iter<I: IntoIterator<Item = Activity>>(iter: I) -> Self {
        Trace(iter.into_iter().collect())
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("⟩")
    }
}

impl fmt::Debug for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// What a running-sequence step does at its node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    Activity(Activity),
    Tau,
    Open,
    Close,
}

impl Event {
    pub fn is_visible(&self) -> bool {
        matches!(self, Event::Activity(_))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Activity(a) => write!(f, "{a}"),
            Event::Tau => f.write_str("τ"),
            Event::Open => f.write_str("open"),
            Event::Close => f.write_str("close"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub node: NodeId,
    pub event: Event,
}

impl Step {
    pub fn new(node: NodeId, event: Event) -> Self {
        Step { node, event }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.node, self.event)
    }
}

/// A complete execution of a tree as (node, event) steps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RunningSequence(pub Vec<Step>);

impl RunningSequence {
    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn activity_projection(&self) -> Trace {
        self.0
            .iter()
            .filter_map(|s| match &s.event {
                Event::Activity(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }

    /// Per node, opens and closes are properly nested and balanced.
    pub fn is_balanced(&self) -> bool {
        let mut open: Vec<NodeId> = Vec::new();
        for s in &self.0 {
            match s.event {
                Event::Open => open.push(s.node),
                Event::Close if open.pop() != Some(s.node) => return false,
                _ => {}
            }
        }
        open.is_empty()
    }
}

impl fmt::Display for RunningSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("⟩")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("enumeration exceeded {cap} sequences")]
    Explosion { cap: usize },
    #[error("loop bound must be at least 1")]
    ZeroLoopBound,
}

/// Running sequences in which every loop executes its body at most
/// `loop_bound` times.
pub fn running_sequences_bounded(t: &ProcessTree, loop_bound: usize) -> Result<BTreeSet<RunningSequence>, SemanticsError> {
    running_sequences_bounded_with_cap(t, loop_bound, DEFAULT_SEQUENCE_CAP)
}

pub fn running_sequences_bounded_with_cap(
    t: &ProcessTree,
    loop_bound: usize,
    cap: usize,
) -> Result<BTreeSet<RunningSequence>, SemanticsError> {
    if loop_bound == 0 {
        return Err(SemanticsError::ZeroLoopBound);
    }
    let seqs = enumerate(t, t.root(), loop_bound, cap, &|v, label| {
        vec![Step::new(
            v,
            match label {
                Label::Activity(a) => Event::Activity(a.clone()),
                _ => Event::Tau,
            },
        )]
    }, &|v, open| vec![Step::new(v, if open { Event::Open } else { Event::Close })])?;
    Ok(seqs.into_iter().map(RunningSequence).collect())
}

/// Traces obtained by projecting the bounded running sequences onto
/// activities. Enumerated directly on traces, which gives the same set.
pub fn language_bounded(t: &ProcessTree, loop_bound: usize) -> Result<BTreeSet<Trace>, SemanticsError> {
    language_bounded_with_cap(t, loop_bound, DEFAULT_SEQUENCE_CAP)
}

pub fn language_bounded_with_cap(t: &ProcessTree, loop_bound: usize, cap: usize) -> Result<BTreeSet<Trace>, SemanticsError> {
    if loop_bound == 0 {
        return Err(SemanticsError::ZeroLoopBound);
    }
    let seqs = enumerate(t, t.root(), loop_bound, cap, &|_, label| match label {
        Label::Activity(a) => vec![a.clone()],
        _ => vec![],
    }, &|_, _| vec![])?;
    Ok(seqs.into_iter().map(Trace).collect())
}

type Leaf<'a, T> = &'a dyn Fn(NodeId, &Label) -> Vec<T>;
type Marker<'a, T> = &'a dyn Fn(NodeId, bool) -> Vec<T>;

fn enumerate<T: Clone + Ord>(
    t: &ProcessTree,
    v: NodeId,
    bound: usize,
    cap: usize,
    leaf: Leaf<'_, T>,
    marker: Marker<'_, T>,
) -> Result<BTreeSet<Vec<T>>, SemanticsError> {
    let check = |s: BTreeSet<Vec<T>>| if s.len() > cap { Err(SemanticsError::Explosion { cap }) } else { Ok(s) };
    let op = match t.label(v) {
        Label::Operator(op) => *op,
        other => return Ok(BTreeSet::from([leaf(v, other)])),
    };
    let children: Vec<BTreeSet<Vec<T>>> = t
        .children(v)
        .iter()
        .map(|&c| enumerate(t, c, bound, cap, leaf, marker))
        .collect::<Result<_, _>>()?;
    let inner: BTreeSet<Vec<T>> = match op {
        Operator::Sequence => {
            let mut acc = BTreeSet::from([Vec::new()]);
            for c in &children {
                acc = check(concat(&acc, c))?;
            }
            acc
        }
        Operator::Choice => check(children.into_iter().flatten().collect())?,
        Operator::Parallel => {
            let mut acc = BTreeSet::from([Vec::new()]);
            for c in &children {
                let mut next = BTreeSet::new();
                for x in &acc {
                    for y in c {
                        shuffle(x, y, &mut Vec::new(), &mut next);
                        if next.len() > cap {
                            return Err(SemanticsError::Explosion { cap });
                        }
                    }
                }
                acc = next;
            }
            acc
        }
        Operator::Loop => {
            let (body, redo) = (&children[0], &children[1]);
            let mut all = body.clone();
            let mut frontier = body.clone();
            for _ in 1..bound {
                frontier = check(concat(&check(concat(&frontier, redo))?, body))?;
                all.extend(frontier.iter().cloned());
                if all.len() > cap {
                    return Err(SemanticsError::Explosion { cap });
                }
            }
            all
        }
    };
    let (open, close) = (marker(v, true), marker(v, false));
    Ok(inner
        .into_iter()
        .map(|s| {
            let mut out = open.clone();
            out.extend(s);
            out.extend(close.iter().cloned());
            out
        })
        .collect())
}

fn concat<T: Clone + Ord>(a: &BTreeSet<Vec<T>>, b: &BTreeSet<Vec<T>>) -> BTreeSet<Vec<T>> {
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            let mut s = x.clone();
            s.extend(y.iter().cloned());
            out.insert(s);
        }
    }
    out
}

fn shuffle<T: Clone + Ord>(x: &[T], y: &[T], prefix: &mut Vec<T>, out: &mut BTreeSet<Vec<T>>) {
    match (x.split_first(), y.split_first()) {
        (None, _) => {
            let mut s = prefix.clone();
            s.extend(y.iter().cloned());
            out.insert(s);
        }
        (_, None) => {
            let mut s = prefix.clone();
            s.extend(x.iter().cloned());
            out.insert(s);
        }
        (Some((hx, tx)), Some((hy, ty))) => {
            prefix.push(hx.clone());
            shuffle(tx, y, prefix, out);
            prefix.pop();
            prefix.push(hy.clone());
            shuffle(x, ty, prefix, out);
            prefix.pop();
        }
    }
}

/// Exact membership: whether `trace ∈ 𝓛(t)` with no loop bound.
///
/// Decided by a zero-deviation search over the tree's execution states,
/// which is the same as asking for an optimal alignment of cost 0.
pub fn accepts(t: &ProcessTree, trace: &Trace) -> bool {
    try_accepts(t, trace, &SearchOptions::default()).unwrap_or(false)
}

pub fn try_accepts(t: &ProcessTree, trace: &Trace, opts: &SearchOptions) -> Result<bool, AlignmentError> {
    alignment::fits(t, trace, opts)
}
