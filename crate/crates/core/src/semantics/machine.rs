//! Step-wise execution of a process tree.
//!
//! A state records, per node, whether it is still to be executed, open, or
//! closed. Firing a step moves the state along one running-sequence step,
//! so the paths from [`TreeMachine::initial`] to a final state are exactly
//! the running sequences of the tree. Closing a node resets its
//! descendants, which keeps states canonical.

use std::collections::{BTreeSet, VecDeque};

use super::{Event, Step};
use crate::tree::{Activity, Label, NodeId, Operator, ProcessTree};

const FUTURE: u8 = 0;
const OPEN: u8 = 1;
const CLOSED: u8 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExecState(Box<[u8]>);

pub struct TreeMachine<'a> {
    tree: &'a ProcessTree,
}

impl<'a> TreeMachine<'a> {
    pub fn new(tree: &'a ProcessTree) -> Self {
        TreeMachine { tree }
    }

    pub fn tree(&self) -> &ProcessTree {
        self.tree
    }

    pub fn initial(&self) -> ExecState {
        ExecState(vec![FUTURE; self.tree.len()].into_boxed_slice())
    }

    pub fn is_final(&self, s: &ExecState) -> bool {
        s.0[0] == CLOSED
    }

    fn start_step(&self, v: NodeId) -> Step {
        let event = match self.tree.label(v) {
            Label::Operator(_) => Event::Open,
            Label::Activity(a) => Event::Activity(a.clone()),
            Label::Tau => Event::Tau,
        };
        Step::new(v, event)
    }

    /// Steps enabled in `s`, ordered by node id.
    pub fn enabled(&self, s: &ExecState) -> Vec<Step> {
        let root = self.tree.root();
        let mut out = Vec::new();
        match s.0[root.0] {
            FUTURE => out.push(self.start_step(root)),
            OPEN => self.collect(s, root, &mut out),
            _ => {}
        }
        out.sort_by(|a, b| (a.node, matches!(a.event, Event::Close)).cmp(&(b.node, matches!(b.event, Event::Close))));
        out
    }

    fn status(&self, s: &ExecState, v: NodeId) -> u8 {
        s.0[v.0]
    }

    fn collect(&self, s: &ExecState, v: NodeId, out: &mut Vec<Step>) {
        let t = self.tree;
        let kids = t.children(v);
        let op = t.operator_of(v).expect("open node is an operator");
        match op {
            Operator::Sequence => match kids.iter().find(|&&c| self.status(s, c) != CLOSED) {
                None => out.push(Step::new(v, Event::Close)),
                Some(&c) if self.status(s, c) == FUTURE => out.push(self.start_step(c)),
                Some(&c) => self.collect(s, c, out),
            },
            Operator::Choice => {
                if kids.iter().any(|&c| self.status(s, c) == CLOSED) {
                    out.push(Step::new(v, Event::Close));
                } else if let Some(&c) = kids.iter().find(|&&c| self.status(s, c) == OPEN) {
                    self.collect(s, c, out);
                } else {
                    out.extend(kids.iter().map(|&c| self.start_step(c)));
                }
            }
            Operator::Parallel => {
                let mut all_closed = true;
                for &c in kids {
                    match self.status(s, c) {
                        FUTURE => {
                            all_closed = false;
                            out.push(self.start_step(c));
                        }
                        OPEN => {
                            all_closed = false;
                            self.collect(s, c, out);
                        }
                        _ => {}
                    }
                }
                if all_closed {
                    out.push(Step::new(v, Event::Close));
                }
            }
            Operator::Loop => {
                let (body, redo) = (kids[0], kids[1]);
                match (self.status(s, body), self.status(s, redo)) {
                    (OPEN, _) => self.collect(s, body, out),
                    (_, OPEN) => self.collect(s, redo, out),
                    (FUTURE, _) => out.push(self.start_step(body)),
                    (_, _) => {
                        out.push(Step::new(v, Event::Close));
                        out.push(self.start_step(redo));
                    }
                }
            }
        }
    }

    fn reset(&self, state: &mut [u8], from: usize, to: usize) {
        state[from..to].iter_mut().for_each(|x| *x = FUTURE);
    }

    /// Applies an enabled step.
    pub fn fire(&self, s: &ExecState, step: &Step) -> ExecState {
        let t = self.tree;
        let v = step.node;
        let mut next = s.0.clone();
        let end = v.0 + t.subtree_size(v);
        match step.event {
            Event::Close => {
                self.reset(&mut next, v.0 + 1, end);
                next[v.0] = CLOSED;
            }
            _ => {
                self.reset(&mut next, v.0, end);
                next[v.0] = if t.is_leaf(v) { CLOSED } else { OPEN };
                if let Some(p) = t.parent(v) {
                    if t.operator_of(p) == Some(Operator::Loop) && t.children(p)[1] == v {
                        let body = t.children(p)[0];
                        self.reset(&mut next, body.0, body.0 + t.subtree_size(body));
                    }
                }
            }
        }
        ExecState(next)
    }

    /// Whether a sequence of steps is a running sequence of the tree.
    pub fn replays(&self, steps: &[Step]) -> bool {
        let mut s = self.initial();
        for step in steps {
            if !self.enabled(&s).contains(step) {
                return false;
            }
            s = self.fire(&s, step);
        }
        self.is_final(&s)
    }

    /// All states reachable from `states` through invisible steps.
    pub fn invisible_closure(&self, states: impl IntoIterator<Item = ExecState>) -> BTreeSet<ExecState> {
        let mut seen: BTreeSet<ExecState> = BTreeSet::new();
        let mut queue: VecDeque<ExecState> = VecDeque::new();
        for s in states {
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            for step in self.enabled(&s) {
                if !step.event.is_visible() {
                    let n = self.fire(&s, &step);
                    if seen.insert(n.clone()) {
                        queue.push_back(n);
                    }
                }
            }
        }
        seen
    }

    /// Visible activities executable next from any of `states`.
    pub fn enabled_activities(&self, states: &BTreeSet<ExecState>) -> BTreeSet<Activity> {
        states
            .iter()
            .flat_map(|s| self.enabled(s))
            .filter_map(|st| match st.event {
                Event::Activity(a) => Some(a),
                _ => None,
            })
            .collect()
    }

    /// States reached by executing `activity` from `states`, closed under
    /// invisible steps.
    pub fn advance(&self, states: &BTreeSet<ExecState>, activity: &Activity) -> BTreeSet<ExecState> {
        let mut hits = Vec::new();
        for s in states {
            for step in self.enabled(s) {
                if matches!(&step.event, Event::Activity(a) if a == activity) {
                    hits.push(self.fire(s, &step));
                }
            }
        }
        self.invisible_closure(hits)
    }
}
