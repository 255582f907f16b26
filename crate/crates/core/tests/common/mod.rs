//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use ptfreeze::freezing::FrozenSet;
use ptfreeze::semantics::language_bounded_with_cap;
use ptfreeze::{accepts, is_subtree, Activity, NodeId, ProcessTree, Trace};

pub const ALPHABET: &[&str] = &["a", "b", "c", "d"];

fn leaf() -> impl Strategy<Value = ProcessTree> {
    prop_oneof![
        4 => proptest::sample::select(ALPHABET).prop_map(ProcessTree::leaf),
        1 => Just(ProcessTree::tau()),
    ]
}

/// Random trees over [`ALPHABET`] with at most `max_nodes` nodes.
pub fn arb_tree(max_nodes: usize) -> impl Strategy<Value = ProcessTree> {
    leaf()
        .prop_recursive(4, max_nodes as u32, 3, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 2..=3).prop_map(ProcessTree::sequence),
                proptest::collection::vec(inner.clone(), 2..=3).prop_map(ProcessTree::choice),
                proptest::collection::vec(inner.clone(), 2..=2).prop_map(ProcessTree::parallel),
                (inner.clone(), inner).prop_map(|(b, r)| ProcessTree::looped(b, r)),
            ]
        })
        .prop_filter("too many nodes", move |t| t.len() <= max_nodes)
}

/// Traces with at most `loop_bound` body executions per loop, or `None`
/// when the enumeration is too large to be useful.
pub fn language(t: &ProcessTree, loop_bound: usize) -> Option<BTreeSet<Trace>> {
    language_bounded_with_cap(t, loop_bound, 20_000).ok()
}

fn lcs(a: &[Activity], b: &[Activity]) -> usize {
    let mut dp = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            dp[i][j] = if a[i - 1] == b[j - 1] { dp[i - 1][j - 1] + 1 } else { dp[i - 1][j].max(dp[i][j - 1]) };
        }
    }
    dp[a.len()][b.len()]
}

/// Cheapest alignment against any trace of `lang`: with only log and model
/// moves the cost is `|σ| + |w| - 2·lcs(σ, w)`.
pub fn brute_alignment_cost(lang: &BTreeSet<Trace>, trace: &Trace) -> usize {
    lang.iter()
        .map(|w| trace.len() + w.len() - 2 * lcs(trace.activities(), w.activities()))
        .min()
        .expect("languages are never empty")
}

/// Which occurrence counts of `label` (0, 1, 2+) appear in `lang`.
pub fn brute_cardinalities(lang: &BTreeSet<Trace>, label: &Activity) -> BTreeSet<usize> {
    lang.iter().map(|w| w.iter().filter(|a| *a == label).count().min(2)).collect()
}

#[derive(Clone, Debug)]
pub enum Mutation {
    Insert(usize, &'static str),
    Delete(usize),
    Swap(usize),
}

pub fn arb_mutations() -> impl Strategy<Value = Vec<Mutation>> {
    let one = prop_oneof![
        (any::<usize>(), proptest::sample::select(&["a", "b", "c", "d", "x"][..])).prop_map(|(i, a)| Mutation::Insert(i, a)),
        any::<usize>().prop_map(Mutation::Delete),
        any::<usize>().prop_map(Mutation::Swap),
    ];
    proptest::collection::vec(one, 0..=2)
}

pub fn mutate(trace: &Trace, muts: &[Mutation]) -> Trace {
    let mut v: Vec<Activity> = trace.activities().to_vec();
    for m in muts {
        match *m {
            Mutation::Insert(i, a) => v.insert(i % (v.len() + 1), Activity::new(a)),
            Mutation::Delete(i) if !v.is_empty() => {
                let n = v.len();
                v.remove(i % n);
            }
            Mutation::Swap(i) if v.len() >= 2 => {
                let i = i % (v.len() - 1);
                v.swap(i, i + 1);
            }
            _ => {}
        }
    }
    Trace::new(v)
}

/// Picks an element by an arbitrary index.
pub fn pick<T: Clone>(items: &BTreeSet<T>, i: usize) -> T {
    items.iter().nth(i % items.len()).cloned().expect("non-empty")
}

#[derive(Debug)]
pub struct Instance {
    pub tree: ProcessTree,
    pub frozen: FrozenSet,
    pub previous: BTreeSet<Trace>,
    pub trace: Trace,
}

/// Greedily keeps the picked nodes that do not nest with earlier picks.
fn non_nested(t: &ProcessTree, picks: &[usize]) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = Vec::new();
    for p in picks {
        let v = NodeId(p % t.len());
        if out.iter().all(|&u| u != v && !t.is_descendant(u, v) && !t.is_descendant(v, u)) {
            out.push(v);
        }
    }
    out
}

fn build(t: ProcessTree, picks: Vec<usize>, prev: Vec<usize>, i: usize, muts: Vec<Mutation>) -> Option<Instance> {
    let lang = language(&t, 2)?;
    let frozen = FrozenSet::from_nodes(&t, &non_nested(&t, &picks)).ok()?;
    let previous = prev.iter().map(|&p| pick(&lang, p)).collect();
    let trace = mutate(&pick(&lang, i), &muts);
    Some(Instance { tree: t, frozen, previous, trace })
}

/// A tree of at most 12 nodes, up to three non-nested frozen subtrees,
/// previously added traces from its bounded language and a mutated trace.
pub fn freezing_instance() -> impl Strategy<Value = Option<Instance>> {
    (
        arb_tree(12),
        proptest::collection::vec(any::<usize>(), 1..=3),
        proptest::collection::vec(any::<usize>(), 0..=3),
        any::<usize>(),
        arb_mutations(),
    )
        .prop_map(|(t, picks, prev, i, muts)| build(t, picks, prev, i, muts))
}

/// Both postconditions of freezing, checked from scratch.
pub fn check_freezing(result: &ProcessTree, inst: &Instance) -> Result<(), String> {
    for f in inst.frozen.items() {
        if !is_subtree(&f.tree, result) {
            return Err(format!("frozen {} missing from {}", f.tree, result));
        }
    }
    for t in inst.previous.iter().chain([&inst.trace]) {
        if !accepts(result, t) {
            return Err(format!("{result} rejects {t}"));
        }
    }
    Ok(())
}

