//! Process trees: the data model, the textual grammar, structural queries
//! and language-preserving reduction.
//!
//! A [`ProcessTree`] is an immutable arena whose node ids are dense and
//! assigned in depth-first, left-to-right order. The root is always node 0
//! and the subtree of any node `v` occupies the contiguous id range
//! `v .. v + size(v)`. Every structural operation returns a fresh tree.

mod dot;
mod parse;
mod reduce;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{parse_tree, parse_tree_with_warnings, ParseWarning};
pub use reduce::{reduce_tree, reduce_tree_preserving};

/// The four process tree operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operator {
    Sequence,
    Choice,
    Parallel,
    Loop,
}

impl Operator {
    /// ASCII token used by the textual grammar.
    pub fn token(self) -> &'static str {
        match self {
            Operator::Sequence => "->",
            Operator::Choice => "X",
            Operator::Parallel => "+",
            Operator::Loop => "*",
        }
    }

    pub fn glyph(self) -> &'static str {
        match self {
            Operator::Sequence => "→",
            Operator::Choice => "×",
            Operator::Parallel => "∧",
            Operator::Loop => "↻",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Prefix shared by generated replacement labels.
pub const REPLACEMENT_OPEN_PREFIX: &str = "__open_";
pub const REPLACEMENT_CLOSE_PREFIX: &str = "__close_";

/// An observable activity name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Activity(String);

/// What an activity label stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActivityKind {
    Ordinary,
    ReplacementOpen(usize),
    ReplacementClose(usize),
}

impl Activity {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "activity names must be non-empty");
        Activity(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Classifies generated replacement labels (`__open_<k>` / `__close_<k>`).
    pub fn kind(&self) -> ActivityKind {
        let parse = |rest: &str| rest.parse::<usize>().ok();
        if let Some(k) = self.0.strip_prefix(REPLACEMENT_OPEN_PREFIX).and_then(parse) {
            ActivityKind::ReplacementOpen(k)
        } else if let Some(k) = self.0.strip_prefix(REPLACEMENT_CLOSE_PREFIX).and_then(parse) {
            ActivityKind::ReplacementClose(k)
        } else {
            ActivityKind::Ordinary
        }
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Activity {
    fn from(s: &str) -> Self {
        Activity::new(s)
    }
}

impl From<String> for Activity {
    fn from(s: String) -> Self {
        Activity::new(s)
    }
}

/// Node label: an operator for inner nodes, an activity or τ for leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Operator(Operator),
    Activity(Activity),
    Tau,
}

impl Label {
    pub fn operator(&self) -> Option<Operator> {
        match self {
            Label::Operator(op) => Some(*op),
            _ => None,
        }
    }

    pub fn activity(&self) -> Option<&Activity> {
        match self {
            Label::Activity(a) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Operator(op) => write!(f, "{op}"),
            Label::Activity(a) => write!(f, "{a}"),
            Label::Tau => f.write_str("tau"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("loop operator at position {position} has {found} children, expected exactly 2")]
    LoopArity { position: usize, found: usize },
    #[error("operator at position {position} has no children")]
    EmptyOperator { position: usize },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("no node at path {0:?}")]
    BadPath(Vec<usize>),
    #[error("loop operator needs exactly 2 children, got {0}")]
    LoopChildren(usize),
    #[error("operator needs at least one child")]
    NoChildren,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Node {
    label: Label,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    size: usize,
    depth: usize,
}

/// A rooted, ordered process tree.
///
/// Equality is structural: two trees are equal iff they have the same shape
/// and labels, which (given dense pre-order ids) is the same as node-for-node
/// equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProcessTree {
    nodes: Vec<Node>,
}

impl ProcessTree {
    pub fn leaf(activity: impl Into<Activity>) -> Self {
        Self::from_parts(Label::Activity(activity.into()), Vec::new())
    }

    pub fn tau() -> Self {
        Self::from_parts(Label::Tau, Vec::new())
    }

    /// Builds an operator node. Loops need exactly two children, other
    /// operators at least one.
    pub fn operator(op: Operator, children: Vec<ProcessTree>) -> Result<Self, TreeError> {
        if op == Operator::Loop && children.len() != 2 {
            return Err(TreeError::LoopChildren(children.len()));
        }
        if children.is_empty() {
            return Err(TreeError::NoChildren);
        }
        Ok(Self::from_parts(Label::Operator(op), children))
    }

    /// `→(children…)`; panics on an empty child list.
    pub fn sequence(children: Vec<ProcessTree>) -> Self {
        Self::operator(Operator::Sequence, children).expect("sequence needs children")
    }

    /// `×(children…)`; panics on an empty child list.
    pub fn choice(children: Vec<ProcessTree>) -> Self {
        Self::operator(Operator::Choice, children).expect("choice needs children")
    }

    /// `∧(children…)`; panics on an empty child list.
    pub fn parallel(children: Vec<ProcessTree>) -> Self {
        Self::operator(Operator::Parallel, children).expect("parallel needs children")
    }

    /// `↻(body, redo)`.
    pub fn looped(body: ProcessTree, redo: ProcessTree) -> Self {
        Self::from_parts(Label::Operator(Operator::Loop), vec![body, redo])
    }

    /// Sequence tree of a trace: τ for the empty trace, a leaf for a single
    /// activity, otherwise `→` over the activities.
    pub fn of_trace<'a>(activities: impl IntoIterator<Item = &'a Activity>) -> Self {
        let mut leaves: Vec<ProcessTree> =
            activities.into_iter().map(|a| ProcessTree::leaf(a.clone())).collect();
        match leaves.len() {
            0 => ProcessTree::tau(),
            1 => leaves.pop().unwrap(),
            _ => ProcessTree::sequence(leaves),
        }
    }

    fn from_parts(label: Label, children: Vec<ProcessTree>) -> Self {
        let total = 1 + children.iter().map(|c| c.nodes.len()).sum::<usize>();
        let mut nodes = Vec::with_capacity(total);
        nodes.push(Node { label, parent: None, children: Vec::new(), size: total, depth: 0 });
        for child in children {
            let offset = nodes.len();
            nodes[0].children.push(NodeId(offset));
            for mut n in child.nodes {
                n.parent = Some(match n.parent {
                    Some(p) => NodeId(p.0 + offset),
                    None => NodeId(0),
                });
                for c in &mut n.children {
                    c.0 += offset;
                }
                n.depth += 1;
                nodes.push(n);
            }
        }
        ProcessTree { nodes }
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.0 < self.nodes.len()
    }

    fn node(&self, v: NodeId) -> &Node {
        &self.nodes[v.0]
    }

    fn check(&self, v: NodeId) -> Result<(), TreeError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(TreeError::UnknownNode(v))
        }
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn label(&self, v: NodeId) -> &Label {
        &self.node(v).label
    }

    pub fn root_label(&self) -> &Label {
        self.label(self.root())
    }

    pub fn operator_of(&self, v: NodeId) -> Option<Operator> {
        self.label(v).operator()
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.node(v).children
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.node(v).parent
    }

    pub fn depth(&self, v: NodeId) -> usize {
        self.node(v).depth
    }

    /// Number of nodes in the subtree rooted at `v`.
    pub fn subtree_size(&self, v: NodeId) -> usize {
        self.node(v).size
    }

    /// Whether `v` lies in the subtree rooted at `ancestor` (inclusive).
    pub fn is_descendant(&self, v: NodeId, ancestor: NodeId) -> bool {
        v.0 >= ancestor.0 && v.0 < ancestor.0 + self.node(ancestor).size
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.node(v).children.is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&v| self.is_leaf(v))
    }

    pub fn height(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// The set of activity labels occurring on leaves.
    pub fn activities(&self) -> BTreeSet<Activity> {
        self.nodes.iter().filter_map(|n| n.label.activity().cloned()).collect()
    }

    /// Operator nodes with a single child (legal for running sequences,
    /// removed by reduction).
    pub fn unary_operators(&self) -> Vec<NodeId> {
        self.node_ids()
            .filter(|&v| self.operator_of(v).is_some() && self.children(v).len() == 1)
            .collect()
    }

    /// The subtree rooted at `v` as a standalone tree.
    pub fn subtree_at(&self, v: NodeId) -> Result<ProcessTree, TreeError> {
        self.check(v)?;
        let size = self.node(v).size;
        let base_depth = self.node(v).depth;
        let nodes = self.nodes[v.0..v.0 + size]
            .iter()
            .enumerate()
            .map(|(i, n)| Node {
                label: n.label.clone(),
                parent: n.parent.filter(|_| i > 0).map(|p| NodeId(p.0 - v.0)),
                children: n.children.iter().map(|c| NodeId(c.0 - v.0)).collect(),
                size: n.size,
                depth: n.depth - base_depth,
            })
            .collect();
        Ok(ProcessTree { nodes })
    }

    /// Whether the subtree of `self` at `v` equals the subtree of `other` at `w`.
    pub fn subtree_equals(&self, v: NodeId, other: &ProcessTree, w: NodeId) -> bool {
        let size = self.node(v).size;
        if other.node(w).size != size {
            return false;
        }
        (0..size).all(|i| {
            let a = &self.nodes[v.0 + i];
            let b = &other.nodes[w.0 + i];
            a.label == b.label
                && a.children.len() == b.children.len()
                && a.children.iter().zip(&b.children).all(|(x, y)| x.0 - v.0 == y.0 - w.0)
        })
    }

    /// First node (in id order) whose subtree equals `pattern`.
    pub fn find_subtree(&self, pattern: &ProcessTree) -> Option<NodeId> {
        self.node_ids().find(|&v| self.subtree_equals(v, pattern, pattern.root()))
    }

    /// All nodes whose subtree equals `pattern`.
    pub fn find_all_subtrees(&self, pattern: &ProcessTree) -> Vec<NodeId> {
        self.node_ids().filter(|&v| self.subtree_equals(v, pattern, pattern.root())).collect()
    }

    /// Lowest common ancestor of a non-empty node set.
    pub fn lca(&self, ns: &[NodeId]) -> Result<NodeId, TreeError> {
        let (&first, rest) = ns.split_first().ok_or(TreeError::NoChildren)?;
        self.check(first)?;
        rest.iter().try_fold(first, |acc, &v| {
            self.check(v)?;
            Ok(self.lca_pair(acc, v))
        })
    }

    fn lca_pair(&self, mut a: NodeId, mut b: NodeId) -> NodeId {
        while self.depth(a) > self.depth(b) {
            a = self.parent(a).expect("non-root has parent");
        }
        while self.depth(b) > self.depth(a) {
            b = self.parent(b).expect("non-root has parent");
        }
        while a != b {
            a = self.parent(a).expect("non-root has parent");
            b = self.parent(b).expect("non-root has parent");
        }
        a
    }

    /// Replaces the subtree at `v` by `replacement`.
    pub fn replace_node(&self, v: NodeId, replacement: &ProcessTree) -> Result<ProcessTree, TreeError> {
        self.check(v)?;
        Ok(self.rebuild(|w| (w == v).then(|| replacement.clone())))
    }

    /// Rebuilds the tree top-down; wherever `f` yields a tree, that node's
    /// subtree is replaced and not descended into.
    pub fn rebuild(&self, mut f: impl FnMut(NodeId) -> Option<ProcessTree>) -> ProcessTree {
        fn go(t: &ProcessTree, v: NodeId, f: &mut dyn FnMut(NodeId) -> Option<ProcessTree>) -> ProcessTree {
            if let Some(r) = f(v) {
                return r;
            }
            let children = t.children(v).iter().map(|&c| go(t, c, f)).collect();
            ProcessTree::from_parts(t.label(v).clone(), children)
        }
        go(self, self.root(), &mut f)
    }

    /// Relabels nodes; the shape is unchanged. Callers must not turn inner
    /// nodes into leaf labels or vice versa.
    pub fn relabel(&self, mut f: impl FnMut(NodeId, &Label) -> Label) -> ProcessTree {
        let mut out = self.clone();
        for (i, n) in out.nodes.iter_mut().enumerate() {
            let new = f(NodeId(i), &n.label);
            debug_assert_eq!(new.operator().is_some(), n.label.operator().is_some());
            n.label = new;
        }
        out
    }

    /// Child-index path from the root to `v`.
    pub fn path_of(&self, v: NodeId) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            let idx = self.children(p).iter().position(|&c| c == cur).expect("child of parent");
            path.push(idx);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Resolves a root-relative child-index path.
    pub fn resolve_path(&self, path: &[usize]) -> Result<NodeId, TreeError> {
        let mut cur = self.root();
        for &i in path {
            cur = *self.children(cur).get(i).ok_or_else(|| TreeError::BadPath(path.to_vec()))?;
        }
        Ok(cur)
    }

    pub fn to_dot(&self) -> String {
        dot::to_dot(self)
    }

    /// Text with Unicode operator glyphs, e.g. `→(a,b)`.
    pub fn to_pretty_string(&self) -> String {
        let mut out = String::new();
        self.write_node(self.root(), &mut out, true);
        out
    }

    fn write_node(&self, v: NodeId, out: &mut String, glyphs: bool) {
        match self.label(v) {
            Label::Operator(op) => {
                out.push_str(if glyphs { op.glyph() } else { op.token() });
                out.push('(');
                for (i, &c) in self.children(v).iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.write_node(c, out, glyphs);
                }
                out.push(')');
            }
            Label::Tau => out.push_str(if glyphs { "τ" } else { "tau" }),
            Label::Activity(a) => parse::write_activity(a, out),
        }
    }
}

/// `T1 ⊑ T2`: some node of `t2` roots a subtree identical to `t1`.
pub fn is_subtree(t1: &ProcessTree, t2: &ProcessTree) -> bool {
    t2.find_subtree(t1).is_some()
}

/// Canonical textual form; `parse_tree` inverts it.
impl fmt::Display for ProcessTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.write_node(self.root(), &mut out, false);
        f.write_str(&out)
    }
}

impl fmt::Debug for ProcessTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProcessTree({self})")
    }
}

impl FromStr for ProcessTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_tree(s)
    }
}

impl Serialize for ProcessTree {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ProcessTree {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_tree(&s).map_err(serde::de::Error::custom)
    }
}

/// Canonical serialization.
pub fn serialize_tree(t: &ProcessTree) -> String {
    t.to_string()
}
