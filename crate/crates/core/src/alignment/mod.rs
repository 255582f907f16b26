//! Optimal alignments between traces and process trees.
//!
//! The search runs over pairs (execution state, trace position). Every move
//! carries a lexicographic cost whose first component is the deviation
//! count; the remaining components only break ties, so the first
//! component of an optimal path is the optimal alignment cost. Ties are
//! broken towards deviations as late in the trace as possible (a log move
//! before a model move at the same position), then subtrees opened late
//! and closed early, and finally by node id through the ordering of
//! enabled steps.

mod search;
mod table;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::semantics::machine::TreeMachine;
use crate::semantics::{Event, RunningSequence, Step, Trace};
use crate::tree::{Activity, Label, Operator, ProcessTree};

pub use table::render_table;

/// Default node-expansion budget of a single search.
pub const DEFAULT_MAX_EXPANSIONS: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub max_expansions: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_expansions: DEFAULT_MAX_EXPANSIONS }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlignmentError {
    #[error("alignment search exceeded its budget of {budget} expansions")]
    BudgetExceeded { budget: usize },
    #[error("trace {trace} is not in the language of the tree")]
    NotInLanguage { trace: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Synchronous,
    LogMove,
    VisibleModelMove,
    InvisibleModelMove,
}

impl MoveKind {
    pub fn is_deviation(self) -> bool {
        matches!(self, MoveKind::LogMove | MoveKind::VisibleModelMove)
    }
}

/// One column of an alignment. `None` stands for the skip symbol ≫.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub log: Option<Activity>,
    pub model: Option<Step>,
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match (&self.log, &self.model) {
            (Some(_), Some(_)) => MoveKind::Synchronous,
            (Some(_), None) => MoveKind::LogMove,
            (None, Some(s)) if s.event.is_visible() => MoveKind::VisibleModelMove,
            (None, _) => MoveKind::InvisibleModelMove,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.log {
            Some(a) => write!(f, "({a},")?,
            None => f.write_str("(≫,")?,
        }
        match &self.model {
            Some(s) => write!(f, "{s})"),
            None => f.write_str("≫)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alignment {
    pub moves: Vec<Move>,
    pub cost: usize,
}

impl Alignment {
    /// The first row without skips.
    pub fn log_projection(&self) -> Trace {
        self.moves.iter().filter_map(|m| m.log.clone()).collect()
    }

    /// The second row without skips.
    pub fn model_run(&self) -> RunningSequence {
        RunningSequence(self.moves.iter().filter_map(|m| m.model.clone()).collect())
    }

    pub fn count(&self, kind: MoveKind) -> usize {
        self.moves.iter().filter(|m| m.kind() == kind).count()
    }

    pub fn log_moves(&self) -> Vec<(usize, &Activity)> {
        self.moves
            .iter()
            .enumerate()
            .filter(|(_, m)| m.kind() == MoveKind::LogMove)
            .map(|(i, m)| (i, m.log.as_ref().unwrap()))
            .collect()
    }

    pub fn to_table(&self) -> String {
        render_table(self)
    }
}

/// An optimal alignment with default search options.
pub fn optimal_alignment(t: &ProcessTree, trace: &Trace) -> Result<Alignment, AlignmentError> {
    optimal_alignment_with(t, trace, &SearchOptions::default())
}

pub fn optimal_alignment_with(t: &ProcessTree, trace: &Trace, opts: &SearchOptions) -> Result<Alignment, AlignmentError> {
    let moves = search::run(t, trace, true, opts)?.expect("a deviating alignment always exists");
    let cost = moves.iter().filter(|m| m.kind().is_deviation()).count();
    Ok(Alignment { moves, cost })
}

/// Whether the trace has an alignment of cost 0.
pub fn fits(t: &ProcessTree, trace: &Trace, opts: &SearchOptions) -> Result<bool, AlignmentError> {
    Ok(search::run(t, trace, false, opts)?.is_some())
}

/// A running sequence whose activity projection is `trace`.
pub fn accepting_run(t: &ProcessTree, trace: &Trace) -> Result<RunningSequence, AlignmentError> {
    accepting_run_with(t, trace, &SearchOptions::default())
}

pub fn accepting_run_with(t: &ProcessTree, trace: &Trace, opts: &SearchOptions) -> Result<RunningSequence, AlignmentError> {
    match search::run(t, trace, false, opts)? {
        Some(moves) => Ok(RunningSequence(moves.into_iter().filter_map(|m| m.model).collect())),
        None => Err(AlignmentError::NotInLanguage { trace: trace.to_string() }),
    }
}

/// Fewest visible activities on any run of `t`; this is the cost of
/// aligning the empty trace.
pub fn min_visible_run_length(t: &ProcessTree) -> usize {
    fn go(t: &ProcessTree, v: crate::tree::NodeId) -> usize {
        match t.label(v) {
            Label::Activity(_) => 1,
            Label::Tau => 0,
            Label::Operator(op) => {
                let kids = t.children(v).iter().map(|&c| go(t, c));
                match op {
                    Operator::Sequence | Operator::Parallel => kids.sum(),
                    Operator::Choice => kids.min().unwrap_or(0),
                    Operator::Loop => go(t, t.children(v)[0]),
                }
            }
        }
    }
    go(t, t.root())
}

/// Checks the three alignment conditions and the recorded cost. Returns a
/// description of the first violation.
pub fn validate(t: &ProcessTree, trace: &Trace, alignment: &Alignment) -> Result<(), String> {
    for (i, m) in alignment.moves.iter().enumerate() {
        match (&m.log, &m.model) {
            (None, None) => return Err(format!("move {i} skips on both rows")),
            (Some(a), Some(s)) if !matches!(&s.event, Event::Activity(b) if b == a) => {
                return Err(format!("move {i} pairs {a} with {s}"));
            }
            _ => {}
        }
        if let Some(s) = &m.model {
            if !t.contains(s.node) {
                return Err(format!("move {i} refers to unknown node {}", s.node));
            }
        }
    }
    if alignment.log_projection() != *trace {
        return Err(format!("first row {} differs from the trace {trace}", alignment.log_projection()));
    }
    let run = alignment.model_run();
    if !TreeMachine::new(t).replays(run.steps()) {
        return Err(format!("second row {run} is not a running sequence"));
    }
    let cost = alignment.moves.iter().filter(|m| m.kind().is_deviation()).count();
    if cost != alignment.cost {
        return Err(format!("recorded cost {} but {cost} deviations", alignment.cost));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{parse_tree, NodeId};

    fn tree(s: &str) -> ProcessTree {
        parse_tree(s).unwrap()
    }

    #[test]
    fn loop_alignment_golden() {
        let t1 = tree("*(X(->(a,b),+(c,d)),tau)");
        let trace = Trace::parse("a,b,c,f");
        let al = optimal_alignment(&t1, &trace).unwrap();
        validate(&t1, &trace, &al).unwrap();
        assert_eq!(al.cost, 2);
        assert_eq!(al.count(MoveKind::LogMove), 1);
        assert_eq!(al.count(MoveKind::VisibleModelMove), 1);
        assert_eq!(al.count(MoveKind::Synchronous), 3);
        let model_move = al.moves.iter().find(|m| m.kind() == MoveKind::VisibleModelMove).unwrap();
        assert_eq!(model_move.model.as_ref().unwrap().event, Event::Activity("d".into()));
        assert_eq!(al.log_moves()[0].1.as_str(), "f");
    }

    #[test]
    fn fitting_and_empty_traces() {
        let t2 = tree("+(e,a)");
        assert_eq!(optimal_alignment(&t2, &Trace::parse("e,a")).unwrap().cost, 0);
        let al = optimal_alignment(&t2, &Trace::empty()).unwrap();
        assert_eq!(al.cost, 2);
        assert_eq!(min_visible_run_length(&t2), 2);
        assert_eq!(min_visible_run_length(&tree("*(X(->(a,b),+(c,d)),tau)")), 2);
        assert_eq!(min_visible_run_length(&tree("*(tau,a)")), 0);
    }

    #[test]
    fn accepting_run_through_tau_loop() {
        let t = tree("*(tau,a)");
        let run = accepting_run(&t, &Trace::parse("a")).unwrap();
        assert_eq!(run.to_string(), "⟨(n0,open),(n1,τ),(n2,a),(n1,τ),(n0,close)⟩");
        assert_eq!(accepting_run(&tree("a"), &Trace::parse("a")).unwrap().to_string(), "⟨(n0,a)⟩");
        assert!(matches!(accepting_run(&t, &Trace::parse("b")), Err(AlignmentError::NotInLanguage { .. })));
    }

    #[test]
    fn budget_is_reported() {
        let t = tree("+(a,b,c,d,e,f)");
        let opts = SearchOptions { max_expansions: 5 };
        assert_eq!(
            optimal_alignment_with(&t, &Trace::parse("f,e,d,c,b,a,x"), &opts),
            Err(AlignmentError::BudgetExceeded { budget: 5 })
        );
    }

    #[test]
    fn validator_catches_broken_alignments() {
        let t = tree("->(a,b)");
        let trace = Trace::parse("a,b");
        let mut al = optimal_alignment(&t, &trace).unwrap();
        validate(&t, &trace, &al).unwrap();
        al.cost = 1;
        assert!(validate(&t, &trace, &al).is_err());
        al.cost = 0;
        al.moves.swap(1, 2);
        assert!(validate(&t, &trace, &al).is_err());
        let both_skip = Alignment { moves: vec![Move { log: None, model: None }], cost: 0 };
        assert!(validate(&t, &Trace::empty(), &both_skip).is_err());
        let mismatch = Alignment {
            moves: vec![Move { log: Some("b".into()), model: Some(Step::new(NodeId(1), Event::Activity("a".into()))) }],
            cost: 0,
        };
        assert!(validate(&t, &Trace::parse("b"), &mismatch).is_err());
    }

    #[test]
    fn foreign_suffix_adds_exactly_its_length() {
        let t = tree("->(*(X(->(a,b),+(c,d)),tau),+(e,a))");
        let base = Trace::parse("a,b,e");
        let c0 = optimal_alignment(&t, &base).unwrap().cost;
        let mut longer = base.clone();
        for x in ["x", "y", "x"] {
            longer.push(x.into());
        }
        assert_eq!(optimal_alignment(&t, &longer).unwrap().cost, c0 + 3);
        let alphabet = t.activities();
        assert_eq!(longer.iter().filter(|a| !alphabet.contains(*a)).collect::<std::collections::BTreeSet<_>>().len(), 2);
    }
}
