use super::{Label, NodeId, Operator, ProcessTree};

/// Language-preserving simplification.
///
/// Rules, applied bottom-up until nothing changes:
/// - an operator with a single child is replaced by that child;
/// - a `→`, `×` or `∧` child of a node with the same operator is flattened
///   into its parent;
/// - τ children of `→` and `∧` are dropped (an all-τ node becomes τ);
/// - duplicate τ children of `×` are merged into one;
/// - `↻(τ,τ)` becomes τ.
pub fn reduce_tree(t: &ProcessTree) -> ProcessTree {
    reduce_tree_preserving(t, &[])
}

/// Like [`reduce_tree`], but any subtree equal to one of `protected` is
/// kept verbatim and is never flattened into its parent.
pub fn reduce_tree_preserving(t: &ProcessTree, protected: &[ProcessTree]) -> ProcessTree {
    let mut current = t.clone();
    loop {
        let (next, _) = reduce_at(&current, current.root(), protected);
        if next == current {
            return next;
        }
        current = next;
    }
}

fn is_protected(t: &ProcessTree, v: NodeId, protected: &[ProcessTree]) -> bool {
    protected.iter().any(|p| t.subtree_equals(v, p, p.root()))
}

fn reduce_at(t: &ProcessTree, v: NodeId, protected: &[ProcessTree]) -> (ProcessTree, bool) {
    if is_protected(t, v, protected) {
        return (t.subtree_at(v).expect("node exists"), true);
    }
    let op = match t.label(v) {
        Label::Operator(op) => *op,
        _ => return (t.subtree_at(v).expect("node exists"), false),
    };
    let reduced: Vec<(ProcessTree, bool)> =
        t.children(v).iter().map(|&c| reduce_at(t, c, protected)).collect();

    if op == Operator::Loop {
        let mut it = reduced.into_iter().map(|(c, _)| c);
        let (body, redo) = (it.next().unwrap(), it.next().unwrap());
        if body.root_label() == &Label::Tau && redo.root_label() == &Label::Tau {
            return (ProcessTree::tau(), false);
        }
        return (ProcessTree::looped(body, redo), false);
    }

    let mut children: Vec<(ProcessTree, bool)> = Vec::with_capacity(reduced.len());
    for (child, child_protected) in reduced {
        if !child_protected && child.operator_of(child.root()) == Some(op) {
            for &g in child.children(child.root()) {
                let grandchild = child.subtree_at(g).unwrap();
                let p = is_protected(&grandchild, grandchild.root(), protected);
                children.push((grandchild, p));
            }
        } else {
            children.push((child, child_protected));
        }
    }

    let is_tau = |c: &ProcessTree| c.root_label() == &Label::Tau;
    match op {
        // a protected τ stays, so a frozen τ leaf survives
        Operator::Sequence | Operator::Parallel => children.retain(|(c, p)| *p || !is_tau(c)),
        Operator::Choice => {
            let mut seen_tau = false;
            children.retain(|(c, _)| {
                if is_tau(c) {
                    !std::mem::replace(&mut seen_tau, true)
                } else {
                    true
                }
            });
        }
        Operator::Loop => unreachable!(),
    }

    match children.len() {
        0 => (ProcessTree::tau(), false),
        1 => children.pop().unwrap(),
        _ => (ProcessTree::operator(op, children.into_iter().map(|(c, _)| c).collect()).expect("non-empty"), false),
    }
}
