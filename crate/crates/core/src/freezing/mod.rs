//! Discovery that keeps user-chosen subtrees intact.
//!
//! Two wrappers around any [`Ipda`]: the baseline runs the algorithm
//! unchanged and puts any lost frozen subtree back in parallel; the
//! advanced variant hides each frozen subtree behind an open/close label
//! pair, discovers on projected traces, and reinserts the subtrees where
//! the labels ended up.

mod advanced;
mod baseline;
mod project;
mod reinsert;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::AlignmentError;
use crate::ipda::IpdaError;
use crate::semantics::Trace;
use crate::tree::{Activity, NodeId, ProcessTree, TreeError};

pub use advanced::{freeze_advanced, freeze_advanced_traced, AdvancedRun};
pub use baseline::{baseline_compose, freeze_baseline};
pub use project::{abstraction_tree, project_next, project_previous, replace_frozen, replace_frozen_upto};
pub use reinsert::{insertion_case, reinsert_frozen, InsertionCase};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreezeError {
    #[error("frozen subtrees at {first:?} and {second:?} are nested")]
    Nested { first: Vec<usize>, second: Vec<usize> },
    #[error("frozen subtree {0} not found in the tree")]
    NotFound(usize),
    #[error("replacement label {0} collides with an activity")]
    LabelCollision(String),
    #[error("the frozen set is empty")]
    EmptyFrozenSet,
    #[error("previously added trace {trace} is not accepted by the tree")]
    Precondition { trace: String },
    #[error("result violates the freezing contract: {0}")]
    Postcondition(String),
    #[error("no insertion candidate accepts the projected traces for frozen subtree {0}")]
    Infeasible(usize),
    #[error(transparent)]
    Ipda(#[from] IpdaError),
    #[error(transparent)]
    Alignment(#[from] AlignmentError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrozenSubtree {
    pub tree: ProcessTree,
    /// Root of the subtree in the host tree.
    pub root: NodeId,
    pub open: Activity,
    pub close: Activity,
}

/// Frozen subtrees of one host tree, pairwise non-nested.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FrozenSet {
    items: Vec<FrozenSubtree>,
}

pub fn open_label(k: usize) -> Activity {
    Activity::new(format!("{}{k}", crate::tree::REPLACEMENT_OPEN_PREFIX))
}

pub fn close_label(k: usize) -> Activity {
    Activity::new(format!("{}{k}", crate::tree::REPLACEMENT_CLOSE_PREFIX))
}

impl FrozenSet {
    pub fn empty() -> Self {
        FrozenSet::default()
    }

    /// Freezes the subtrees at `roots`, labelling the k-th (from 1) with
    /// `__open_k` / `__close_k`.
    pub fn from_nodes(host: &ProcessTree, roots: &[NodeId]) -> Result<Self, FreezeError> {
        let labelled: Vec<(NodeId, Activity, Activity)> =
            roots.iter().enumerate().map(|(i, &v)| (v, open_label(i + 1), close_label(i + 1))).collect();
        FrozenSet::with_labels(host, labelled)
    }

    pub fn from_paths(host: &ProcessTree, paths: &[Vec<usize>]) -> Result<Self, FreezeError> {
        let roots = paths.iter().map(|p| host.resolve_path(p)).collect::<Result<Vec<_>, _>>()?;
        FrozenSet::from_nodes(host, &roots)
    }

    /// Freezes with caller-chosen replacement labels.
    pub fn with_labels(host: &ProcessTree, items: Vec<(NodeId, Activity, Activity)>) -> Result<Self, FreezeError> {
        let alphabet = host.activities();
        let mut seen_labels = BTreeSet::new();
        let mut out = Vec::with_capacity(items.len());
        for (v, open, close) in items {
            let tree = host.subtree_at(v)?;
            for l in [&open, &close] {
                if alphabet.contains(l) || !seen_labels.insert(l.clone()) {
                    return Err(FreezeError::LabelCollision(l.to_string()));
                }
            }
            out.push(FrozenSubtree { tree, root: v, open, close });
        }
        for (i, a) in out.iter().enumerate() {
            for b in &out[i + 1..] {
                if a.root == b.root || host.is_descendant(a.root, b.root) || host.is_descendant(b.root, a.root) {
                    return Err(FreezeError::Nested { first: host.path_of(a.root), second: host.path_of(b.root) });
                }
            }
        }
        Ok(FrozenSet { items: out })
    }

    /// Fails if a replacement label is also an activity of `alphabet`.
    pub fn check_alphabet(&self, alphabet: &BTreeSet<Activity>) -> Result<(), FreezeError> {
        for f in &self.items {
            for l in [&f.open, &f.close] {
                if alphabet.contains(l) {
                    return Err(FreezeError::LabelCollision(l.to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[FrozenSubtree] {
        &self.items
    }

    pub fn trees(&self) -> Vec<ProcessTree> {
        self.items.iter().map(|f| f.tree.clone()).collect()
    }

    /// Frozen subtrees must still sit at their recorded roots.
    pub fn check_host(&self, host: &ProcessTree) -> Result<(), FreezeError> {
        for (i, f) in self.items.iter().enumerate() {
            if !host.contains(f.root) || !host.subtree_equals(f.root, &f.tree, f.tree.root()) {
                return Err(FreezeError::NotFound(i + 1));
            }
        }
        Ok(())
    }

    /// Finds the frozen subtrees again in a rewritten host, keeping labels.
    /// Each subtree takes its first occurrence in node order that does not
    /// overlap an already placed one.
    pub fn relocate(&self, host: &ProcessTree) -> Result<Self, FreezeError> {
        let mut placed: Vec<NodeId> = Vec::new();
        let mut items = Vec::with_capacity(self.items.len());
        for (i, f) in self.items.iter().enumerate() {
            let root = host
                .find_all_subtrees(&f.tree)
                .into_iter()
                .find(|&v| {
                    placed.iter().all(|&p| p != v && !host.is_descendant(v, p) && !host.is_descendant(p, v))
                })
                .ok_or(FreezeError::NotFound(i + 1))?;
            placed.push(root);
            items.push(FrozenSubtree { root, ..f.clone() });
        }
        Ok(FrozenSet { items })
    }

    pub fn paths(&self, host: &ProcessTree) -> Vec<Vec<usize>> {
        self.items.iter().map(|f| host.path_of(f.root)).collect()
    }
}

/// Intermediate projections of one trace: `levels[i]` has the first `i`
/// frozen subtrees replaced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionRecord {
    pub levels: Vec<Trace>,
}

impl ProjectionRecord {
    pub fn original(&self) -> &Trace {
        &self.levels[0]
    }

    pub fn projected(&self) -> &Trace {
        self.levels.last().expect("at least one level")
    }
}

/// Both freezing contracts: every frozen subtree survives and every trace
/// is accepted.
pub fn check_freezing_postcondition(
    result: &ProcessTree,
    frozen: &FrozenSet,
    traces: &[&Trace],
    search: &crate::alignment::SearchOptions,
) -> Result<(), FreezeError> {
    for (i, f) in frozen.items().iter().enumerate() {
        if !crate::tree::is_subtree(&f.tree, result) {
            return Err(FreezeError::Postcondition(format!("frozen subtree {} ({}) is missing", i + 1, f.tree)));
        }
    }
    for t in traces {
        if !crate::alignment::fits(result, t, search)? {
            return Err(FreezeError::Postcondition(format!("trace {t} is rejected")));
        }
    }
    Ok(())
}

pub(crate) fn check_previous(
    t: &ProcessTree,
    previous: &BTreeSet<Trace>,
    search: &crate::alignment::SearchOptions,
) -> Result<(), FreezeError> {
    for p in previous {
        if !crate::alignment::fits(t, p, search)? {
            return Err(FreezeError::Precondition { trace: p.to_string() });
        }
    }
    Ok(())
}
