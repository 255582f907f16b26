use log::warn;

use super::{FreezeError, FrozenSet, ProjectionRecord};
use crate::alignment::{fits, SearchOptions};
use crate::semantics::{sta, Cardinality, CardinalitySet};
use crate::tree::{reduce_tree_preserving, Label, NodeId, ProcessTree};

/// How a frozen subtree is combined with the insertion candidate, chosen
/// by how often its open/close labels can occur there.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertionCase {
    /// exactly once: `∧(T_i, T_c')`
    Once,
    /// at most once: `∧(×(τ,T_i), T_c')`
    Optional,
    /// at least once: `∧(↻(T_i,τ), T_c')`
    Repeated,
    /// any number of times: `∧(↻(τ,T_i), T_c')`
    Any,
}

pub fn insertion_case(s: CardinalitySet) -> InsertionCase {
    let s = if s.is_empty() {
        warn!("open/close cardinalities do not intersect; falling back to {{0,∞}}");
        CardinalitySet::ZERO_MANY
    } else {
        s
    };
    match (s.contains(Cardinality::Zero), s.contains(Cardinality::Many)) {
        (false, false) => InsertionCase::Once,
        (true, false) => InsertionCase::Optional,
        (false, true) => InsertionCase::Repeated,
        (true, true) => InsertionCase::Any,
    }
}

impl InsertionCase {
    pub fn wrap(self, frozen: &ProcessTree) -> ProcessTree {
        let f = frozen.clone();
        match self {
            InsertionCase::Once => f,
            InsertionCase::Optional => ProcessTree::choice(vec![ProcessTree::tau(), f]),
            InsertionCase::Repeated => ProcessTree::looped(f, ProcessTree::tau()),
            InsertionCase::Any => ProcessTree::looped(ProcessTree::tau(), f),
        }
    }
}

/// Puts the frozen subtrees back into a tree discovered on projected
/// traces, last one first. For each, the first candidate is the LCA of its
/// open/close leaves; a candidate is kept if the tree then accepts every
/// record at the level where the earlier subtrees are still replaced,
/// otherwise its parent is tried. The result is reduced without touching
/// the frozen subtrees.
pub fn reinsert_frozen(
    discovered: &ProcessTree,
    frozen: &FrozenSet,
    records: &[ProjectionRecord],
    search: &SearchOptions,
) -> Result<ProcessTree, FreezeError> {
    let mut tree = discovered.clone();
    for idx in (0..frozen.len()).rev() {
        let f = &frozen.items()[idx];
        let checks: Vec<_> = records.iter().map(|r| &r.levels[idx]).collect();
        let marks: Vec<NodeId> = tree
            .leaves()
            .filter(|&v| matches!(tree.label(v), Label::Activity(a) if *a == f.open || *a == f.close))
            .collect();
        let mut candidate = if marks.is_empty() { tree.root() } else { tree.lca(&marks)? };
        loop {
            let sub = tree.subtree_at(candidate)?;
            let s = sta(&sub, &f.open).intersection(sta(&sub, &f.close));
            let blanked = sub.relabel(|_, l| match l {
                Label::Activity(a) if *a == f.open || *a == f.close => Label::Tau,
                other => other.clone(),
            });
            let combined = ProcessTree::parallel(vec![insertion_case(s).wrap(&f.tree), blanked]);
            let next = tree.replace_node(candidate, &combined)?;
            let mut ok = true;
            for c in &checks {
                if !fits(&next, c, search)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                tree = next;
                break;
            }
            match tree.parent(candidate) {
                Some(p) => candidate = p,
                None => return Err(FreezeError::Infeasible(idx + 1)),
            }
        }
    }
    Ok(reduce_tree_preserving(&tree, &frozen.trees()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::Trace;
    use crate::tree::parse_tree;

    fn frozen(host: &str, v: usize, open: &str, close: &str) -> FrozenSet {
        let t = parse_tree(host).unwrap();
        FrozenSet::with_labels(&t, vec![(NodeId(v), open.into(), close.into())]).unwrap()
    }

    fn record(levels: &[&str]) -> ProjectionRecord {
        ProjectionRecord { levels: levels.iter().map(|l| Trace::parse(l)).collect() }
    }

    #[test]
    fn cases_from_cardinalities() {
        assert_eq!(insertion_case(CardinalitySet::ONE), InsertionCase::Once);
        assert_eq!(insertion_case(CardinalitySet::ZERO_ONE), InsertionCase::Optional);
        assert_eq!(insertion_case(CardinalitySet::ONE_MANY), InsertionCase::Repeated);
        assert_eq!(insertion_case(CardinalitySet::ZERO_MANY), InsertionCase::Any);
        assert_eq!(insertion_case(CardinalitySet::EMPTY), InsertionCase::Any);
    }

    #[test]
    fn lone_marker_pair_collapses_to_the_frozen_leaf() {
        let f = frozen("x", 0, "open", "close");
        let t = parse_tree("->(open,close)").unwrap();
        let out = reinsert_frozen(&t, &f, &[record(&["x", "open,close"])], &SearchOptions::default()).unwrap();
        assert_eq!(out.to_string(), "x");
    }

    #[test]
    fn optional_marker_pair() {
        let f = frozen("->(x,y)", 0, "open", "close");
        let t = parse_tree("X(->(open,close),b)").unwrap();
        let recs = [record(&["x,y", "open,close"]), record(&["b", "b"])];
        let out = reinsert_frozen(&t, &f, &recs, &SearchOptions::default()).unwrap();
        // the LCA is the inner sequence, where the pair occurs exactly once
        assert_eq!(out.to_string(), "X(->(x,y),b)");
        let out = reinsert_frozen(
            &parse_tree("->(X(open,b),X(close,tau))").unwrap(),
            &f,
            &[record(&["x,y", "open,close"]), record(&["b", "b"])],
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(out.to_string(), "+(X(tau,->(x,y)),X(tau,b))");
    }

    #[test]
    fn escalates_when_the_lca_is_too_narrow() {
        // the pair sits in one branch but the frozen activity is also seen
        // with b, so the LCA alone cannot explain ⟨b,x⟩
        let f = frozen("x", 0, "o", "c");
        let t = parse_tree("X(->(o,c),b)").unwrap();
        let recs = [record(&["x", "o,c"]), record(&["b,x", "b"])];
        let out = reinsert_frozen(&t, &f, &recs, &SearchOptions::default()).unwrap();
        assert_eq!(out.to_string(), "+(X(tau,x),X(tau,b))");
    }
}
