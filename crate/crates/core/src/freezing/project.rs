use std::collections::{BTreeSet, HashMap};

use super::{FreezeError, FrozenSet, ProjectionRecord};
use crate::alignment::{accepting_run_with, optimal_alignment_with, MoveKind, SearchOptions};
use crate::semantics::{Event, Step, Trace};
use crate::tree::{Activity, NodeId, ProcessTree};

/// Replaces every frozen root by `→(open_i, close_i)`.
pub fn replace_frozen(t: &ProcessTree, frozen: &FrozenSet) -> Result<ProcessTree, FreezeError> {
    replace_frozen_upto(t, frozen, frozen.len())
}

/// Replaces only the first `level` frozen subtrees.
pub fn replace_frozen_upto(t: &ProcessTree, frozen: &FrozenSet, level: usize) -> Result<ProcessTree, FreezeError> {
    frozen.check_host(t)?;
    let replaced: HashMap<NodeId, ProcessTree> = frozen.items()[..level]
        .iter()
        .map(|f| {
            let marker = ProcessTree::sequence(vec![ProcessTree::leaf(f.open.clone()), ProcessTree::leaf(f.close.clone())]);
            (f.root, marker)
        })
        .collect();
    Ok(t.rebuild(|v| replaced.get(&v).cloned()))
}

/// Where frozen subtree roots start and end in a run on the host tree.
struct Spans {
    /// (first node id, one past last) per frozen subtree
    ranges: Vec<(usize, usize)>,
}

impl Spans {
    fn new(host: &ProcessTree, roots: impl Iterator<Item = NodeId>) -> Self {
        Spans { ranges: roots.map(|r| (r.0, r.0 + host.subtree_size(r))).collect() }
    }

    fn owner(&self, v: NodeId) -> Option<usize> {
        self.ranges.iter().position(|&(a, b)| a <= v.0 && v.0 < b)
    }

    fn is_root(&self, j: usize, v: NodeId) -> bool {
        self.ranges[j].0 == v.0
    }
}

/// Projects a run on the host tree at every level.
fn project_run(steps: &[Step], spans: &Spans, frozen: &FrozenSet) -> ProjectionRecord {
    let levels = (0..=frozen.len())
        .map(|level| {
            let mut out = Vec::new();
            for s in steps {
                match spans.owner(s.node).filter(|&j| j < level) {
                    Some(j) if spans.is_root(j, s.node) => {
                        let f = &frozen.items()[j];
                        match s.event {
                            Event::Open => out.push(f.open.clone()),
                            Event::Close => out.push(f.close.clone()),
                            // leaf frozen root: opened and closed in one step
                            _ => {
                                out.push(f.open.clone());
                                out.push(f.close.clone());
                            }
                        }
                    }
                    Some(_) => {}
                    None => {
                        if let Event::Activity(a) = &s.event {
                            out.push(a.clone());
                        }
                    }
                }
            }
            Trace::new(out)
        })
        .collect();
    ProjectionRecord { levels }
}

/// Replays each trace on `t` and replaces each execution of a frozen
/// subtree by its open/close labels.
pub fn project_previous<'a>(
    t: &ProcessTree,
    frozen: &FrozenSet,
    previous: impl IntoIterator<Item = &'a Trace>,
    search: &SearchOptions,
) -> Result<Vec<ProjectionRecord>, FreezeError> {
    frozen.check_host(t)?;
    let spans = Spans::new(t, frozen.items().iter().map(|f| f.root));
    previous
        .into_iter()
        .map(|trace| {
            let run = accepting_run_with(t, trace, search)?;
            Ok(project_run(run.steps(), &spans, frozen))
        })
        .collect()
}

/// `↻(τ, T_1)` for one frozen subtree, `∧(↻(τ,T_1), …, ↻(τ,T_n))` for
/// several.
pub fn abstraction_tree(frozen: &FrozenSet) -> Result<ProcessTree, FreezeError> {
    let loops: Vec<ProcessTree> =
        frozen.items().iter().map(|f| ProcessTree::looped(ProcessTree::tau(), f.tree.clone())).collect();
    match loops.len() {
        0 => Err(FreezeError::EmptyFrozenSet),
        1 => Ok(loops.into_iter().next().unwrap()),
        _ => Ok(ProcessTree::parallel(loops)),
    }
}

/// Node ranges of the frozen subtrees inside the abstraction tree.
fn abstraction_spans(a: &ProcessTree, n: usize) -> Spans {
    let roots: Vec<NodeId> = if n == 1 {
        vec![a.children(a.root())[1]]
    } else {
        a.children(a.root()).iter().map(|&l| a.children(l)[1]).collect()
    };
    Spans::new(a, roots.into_iter())
}

/// Aligns the trace with the abstraction tree and replaces every
/// deviation-free execution of a frozen subtree by its open/close labels.
/// Log moves during such an execution stay where they are.
pub fn project_next(frozen: &FrozenSet, trace: &Trace, search: &SearchOptions) -> Result<ProjectionRecord, FreezeError> {
    if frozen.is_empty() {
        return Ok(ProjectionRecord { levels: vec![trace.clone()] });
    }
    let a = abstraction_tree(frozen)?;
    let spans = abstraction_spans(&a, frozen.len());
    let al = optimal_alignment_with(&a, trace, search)?;

    // A segment runs from a root open to its close; for leaf roots it is
    // the single step. It is full when no visible model move falls inside.
    let mut full: BTreeSet<usize> = BTreeSet::new();
    let mut segment_of: Vec<Option<usize>> = vec![None; al.moves.len()];
    let mut open_at: Vec<Option<(usize, bool)>> = vec![None; frozen.len()];
    for (i, m) in al.moves.iter().enumerate() {
        let Some(step) = &m.model else { continue };
        let Some(j) = spans.owner(step.node) else { continue };
        let leaf_root = spans.is_root(j, step.node) && !matches!(step.event, Event::Open | Event::Close);
        if leaf_root {
            segment_of[i] = Some(i);
            if m.kind() == MoveKind::Synchronous {
                full.insert(i);
            }
            continue;
        }
        if spans.is_root(j, step.node) && step.event == Event::Open {
            open_at[j] = Some((i, true));
        }
        let Some((start, clean)) = open_at[j] else { continue };
        let clean = clean && m.kind() != MoveKind::VisibleModelMove;
        open_at[j] = Some((start, clean));
        segment_of[i] = Some(start);
        if spans.is_root(j, step.node) && step.event == Event::Close {
            segment_of[start] = Some(start);
            if clean {
                full.insert(start);
            }
            open_at[j] = None;
        }
    }

    let levels = (0..=frozen.len())
        .map(|level| {
            let mut out: Vec<Activity> = Vec::new();
            for (i, m) in al.moves.iter().enumerate() {
                let owner = m.model.as_ref().and_then(|s| spans.owner(s.node));
                let replaced = match (owner, segment_of[i]) {
                    (Some(j), Some(seg)) if j < level && full.contains(&seg) => Some(j),
                    _ => None,
                };
                match (replaced, m.model.as_ref()) {
                    (Some(j), Some(step)) if spans.is_root(j, step.node) => {
                        let f = &frozen.items()[j];
                        match step.event {
                            Event::Open => out.push(f.open.clone()),
                            Event::Close => out.push(f.close.clone()),
                            _ => {
                                out.push(f.open.clone());
                                out.push(f.close.clone());
                            }
                        }
                    }
                    (Some(_), _) => {}
                    (None, _) => {
                        if let Some(a) = &m.log {
                            out.push(a.clone());
                        }
                    }
                }
            }
            Trace::new(out)
        })
        .collect();
    Ok(ProjectionRecord { levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_tree;

    fn t0() -> ProcessTree {
        parse_tree("->(*(X(->(a,b),+(c,d)),tau),+(e,a))").unwrap()
    }

    fn frozen_t2(t: &ProcessTree) -> FrozenSet {
        FrozenSet::with_labels(t, vec![(NodeId(10), "openT2".into(), "closeT2".into())]).unwrap()
    }

    #[test]
    fn replacement_of_t2() {
        let t = t0();
        let r = replace_frozen(&t, &frozen_t2(&t)).unwrap();
        assert_eq!(r.to_string(), "->(*(X(->(a,b),+(c,d)),tau),->(openT2,closeT2))");
        assert_eq!(replace_frozen(&t, &FrozenSet::empty()).unwrap(), t);
    }

    #[test]
    fn two_frozen_leaves() {
        let t = parse_tree("->(a,b)").unwrap();
        let f = FrozenSet::with_labels(
            &t,
            vec![(NodeId(1), "o1".into(), "c1".into()), (NodeId(2), "o2".into(), "c2".into())],
        )
        .unwrap();
        assert_eq!(replace_frozen(&t, &f).unwrap().to_string(), "->(->(o1,c1),->(o2,c2))");
        assert_eq!(replace_frozen_upto(&t, &f, 1).unwrap().to_string(), "->(->(o1,c1),b)");
        let recs = project_previous(&t, &f, [&Trace::parse("a,b")], &SearchOptions::default()).unwrap();
        let shown: Vec<String> = recs[0].levels.iter().map(|l| l.to_string()).collect();
        assert_eq!(shown, vec!["⟨a,b⟩", "⟨o1,c1,b⟩", "⟨o1,c1,o2,c2⟩"]);
    }

    #[test]
    fn previous_traces_of_the_running_example() {
        let t = t0();
        let f = frozen_t2(&t);
        let s1 = Trace::parse("d,c,a,b,a,e");
        let s2 = Trace::parse("a,b,e,a");
        let recs = project_previous(&t, &f, [&s1, &s2], &SearchOptions::default()).unwrap();
        assert_eq!(recs[0].projected().to_string(), "⟨d,c,a,b,openT2,closeT2⟩");
        assert_eq!(recs[1].projected().to_string(), "⟨a,b,openT2,closeT2⟩");
        assert_eq!(recs[0].original(), &s1);
    }

    #[test]
    fn abstraction_trees() {
        let t = t0();
        assert_eq!(abstraction_tree(&frozen_t2(&t)).unwrap().to_string(), "*(tau,+(e,a))");
        let u = parse_tree("->(+(e,a),x)").unwrap();
        let two = FrozenSet::from_nodes(&u, &[NodeId(1), NodeId(4)]).unwrap();
        assert_eq!(abstraction_tree(&two).unwrap().to_string(), "+(*(tau,+(e,a)),*(tau,x))");
        assert_eq!(abstraction_tree(&FrozenSet::empty()), Err(FreezeError::EmptyFrozenSet));
    }

    #[test]
    fn next_trace_of_the_running_example() {
        let t = t0();
        let f = frozen_t2(&t);
        let opts = SearchOptions::default();
        let rec = project_next(&f, &Trace::parse("c,d,a,e,a,a,e"), &opts).unwrap();
        assert_eq!(rec.projected().to_string(), "⟨c,d,openT2,closeT2,openT2,a,closeT2⟩");
        assert_eq!(project_next(&f, &Trace::parse("c,d"), &opts).unwrap().projected().to_string(), "⟨c,d⟩");
        // e alone needs a model move on a, so it is not a full execution
        assert_eq!(project_next(&f, &Trace::parse("e"), &opts).unwrap().projected().to_string(), "⟨e⟩");
    }

    #[test]
    fn next_trace_with_frozen_leaf() {
        let t = parse_tree("->(a,x)").unwrap();
        let f = FrozenSet::with_labels(&t, vec![(NodeId(2), "o".into(), "c".into())]).unwrap();
        let rec = project_next(&f, &Trace::parse("x,a,x"), &SearchOptions::default()).unwrap();
        assert_eq!(rec.projected().to_string(), "⟨o,c,a,o,c⟩");
    }
}
