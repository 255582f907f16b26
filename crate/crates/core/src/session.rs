//! Interactive state for incremental discovery: the current tree, the
//! traces added so far, the frozen selection, and an undo history.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eventlog::{EventLog, VariantList};
use crate::freezing::{FreezeError, FrozenSet};
use crate::ipda::{ipda_by_name, IpdaError, IpdaOptions, IpdaRequest};
use crate::metrics::{quality, QualityReport};
use crate::scenario::{apply_algorithm, Algorithm};
use crate::semantics::Trace;
use crate::tree::{parse_tree, Activity, ActivityKind, NodeId, ProcessTree, TreeError};
use crate::alignment::{fits, AlignmentError};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("log activity {0} uses a reserved replacement prefix")]
    ReservedActivity(String),
    #[error("the log is empty and no initial tree was given")]
    NoInitialTree,
    #[error("no variant with index {0}")]
    NoVariant(usize),
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("traces can only be seeded before the first increment")]
    AlreadyStarted,
    #[error("invalid snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Freeze(#[from] FreezeError),
    #[error(transparent)]
    Ipda(#[from] IpdaError),
    #[error(transparent)]
    Alignment(#[from] AlignmentError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrozenEntry {
    pub path: Vec<usize>,
    pub open: String,
    pub close: String,
}

/// One applied increment, enough to replay it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncrementRecord {
    pub trace: Vec<String>,
    pub algorithm: Algorithm,
    pub frozen: Vec<FrozenEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct State {
    tree: String,
    previous: Vec<Vec<String>>,
    frozen: Vec<FrozenEntry>,
    report: QualityReport,
}

/// Serialized form of a whole session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub ipda: String,
    pub log: String,
    pub initial_tree: String,
    pub initial_previous: Vec<Vec<String>>,
    pub increments: Vec<IncrementRecord>,
    pub frozen: Vec<FrozenEntry>,
}

fn names(t: &Trace) -> Vec<String> {
    t.iter().map(|a| a.to_string()).collect()
}

pub struct FreezeSession {
    ipda: String,
    opts: IpdaOptions,
    log: EventLog,
    variants: VariantList,
    tree: ProcessTree,
    previous: BTreeSet<Trace>,
    frozen: FrozenSet,
    /// Quality of the current tree on the whole log.
    report: QualityReport,
    initial: (ProcessTree, BTreeSet<Trace>),
    increments: Vec<IncrementRecord>,
    history: Vec<State>,
    /// One report per tree so far, the initial one first.
    reports: Vec<QualityReport>,
}

impl FreezeSession {
    /// Without an initial tree the session starts from the sequence of the
    /// most frequent variant, which then counts as already added.
    pub fn new(log: EventLog, initial: Option<ProcessTree>, ipda: &str, opts: IpdaOptions) -> Result<Self, SessionError> {
        if let Some(a) = log.alphabet().into_iter().find(|a| a.kind() != ActivityKind::Ordinary) {
            return Err(SessionError::ReservedActivity(a.to_string()));
        }
        ipda_by_name(ipda)?;
        let variants = log.variants();
        let mut previous = BTreeSet::new();
        let tree = match initial {
            Some(t) => t,
            None => {
                let top = variants.first().ok_or(SessionError::NoInitialTree)?;
                previous.insert(top.trace.clone());
                ProcessTree::of_trace(top.trace.iter())
            }
        };
        let report = quality(&log, &tree, &opts.search)?;
        Ok(FreezeSession {
            ipda: ipda.to_string(),
            opts,
            log,
            variants,
            initial: (tree.clone(), previous.clone()),
            tree,
            previous,
            frozen: FrozenSet::empty(),
            reports: vec![report.clone()],
            report,
            increments: Vec::new(),
            history: Vec::new(),
        })
    }

    pub fn tree(&self) -> &ProcessTree {
        &self.tree
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn variants(&self) -> &VariantList {
        &self.variants
    }

    pub fn previous(&self) -> &BTreeSet<Trace> {
        &self.previous
    }

    pub fn frozen(&self) -> &FrozenSet {
        &self.frozen
    }

    pub fn frozen_paths(&self) -> Vec<Vec<usize>> {
        self.frozen.paths(&self.tree)
    }

    pub fn report(&self) -> &QualityReport {
        &self.report
    }

    pub fn reports(&self) -> &[QualityReport] {
        &self.reports
    }

    pub fn increments(&self) -> &[IncrementRecord] {
        &self.increments
    }

    pub fn ipda(&self) -> &str {
        &self.ipda
    }

    /// Whether `trace` was already added.
    pub fn is_added(&self, trace: &Trace) -> bool {
        self.previous.contains(trace)
    }

    /// Records a trace as already added before any increment. The tree
    /// must accept it.
    pub fn seed_previous(&mut self, trace: Trace) -> Result<(), SessionError> {
        if !self.increments.is_empty() {
            return Err(SessionError::AlreadyStarted);
        }
        if !fits(&self.tree, &trace, &self.opts.search)? {
            return Err(FreezeError::Precondition { trace: trace.to_string() }.into());
        }
        self.previous.insert(trace.clone());
        self.initial.1.insert(trace);
        Ok(())
    }

    /// Replaces the frozen selection with the subtrees at `paths`.
    pub fn set_frozen(&mut self, paths: &[Vec<usize>]) -> Result<(), SessionError> {
        let frozen = FrozenSet::from_paths(&self.tree, paths)?;
        frozen.check_alphabet(&self.log.alphabet())?;
        self.frozen = frozen;
        Ok(())
    }

    pub fn apply_variant(&mut self, index: usize, algorithm: Algorithm) -> Result<&QualityReport, SessionError> {
        let trace = self.variants.get(index).ok_or(SessionError::NoVariant(index))?.trace.clone();
        self.apply_trace(trace, algorithm)
    }

    /// Adds one trace. On error the session is unchanged.
    pub fn apply_trace(&mut self, trace: Trace, algorithm: Algorithm) -> Result<&QualityReport, SessionError> {
        let imp = ipda_by_name(&self.ipda)?;
        let req = IpdaRequest { tree: self.tree.clone(), trace: trace.clone(), previous: self.previous.clone() };
        let next = apply_algorithm(algorithm, imp.as_ref(), &req, &self.frozen, &self.opts)?;
        let report = quality(&self.log, &next, &self.opts.search)?;
        // the plain algorithm may drop frozen subtrees; the selection is
        // cleared rather than guessed
        let frozen = self.frozen.relocate(&next).unwrap_or_default();
        self.history.push(self.state());
        self.increments.push(IncrementRecord { trace: names(&trace), algorithm, frozen: self.frozen_entries() });
        self.previous.insert(trace);
        self.tree = next;
        self.frozen = frozen;
        self.reports.push(report.clone());
        self.report = report;
        Ok(&self.report)
    }

    pub fn undo(&mut self) -> Result<(), SessionError> {
        let s = self.history.pop().ok_or(SessionError::NothingToUndo)?;
        self.increments.pop();
        self.reports.pop();
        self.restore(s)
    }

    fn frozen_entries(&self) -> Vec<FrozenEntry> {
        self.frozen
            .items()
            .iter()
            .map(|f| FrozenEntry {
                path: self.tree.path_of(f.root),
                open: f.open.to_string(),
                close: f.close.to_string(),
            })
            .collect()
    }

    fn state(&self) -> State {
        State {
            tree: self.tree.to_string(),
            previous: self.previous.iter().map(names).collect(),
            frozen: self.frozen_entries(),
            report: self.report.clone(),
        }
    }

    fn restore(&mut self, s: State) -> Result<(), SessionError> {
        self.tree = parse_tree(&s.tree)?;
        self.previous = s.previous.iter().map(|t| Trace::from_names(t)).collect();
        self.frozen = frozen_from_entries(&self.tree, &s.frozen)?;
        self.report = s.report;
        Ok(())
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            ipda: self.ipda.clone(),
            log: self.log.to_jsonl(),
            initial_tree: self.initial.0.to_string(),
            initial_previous: self.initial.1.iter().map(names).collect(),
            increments: self.increments.clone(),
            frozen: self.frozen_entries(),
        }
    }

    /// Rebuilds a session by replaying its increments, so an imported
    /// snapshot re-derives every tree instead of trusting stored ones.
    pub fn from_snapshot(s: &SessionSnapshot, opts: IpdaOptions) -> Result<Self, SessionError> {
        let log = EventLog::from_jsonl(&s.log).map_err(|e| SessionError::Snapshot(e.to_string()))?;
        let mut session = FreezeSession::new(log, Some(parse_tree(&s.initial_tree)?), &s.ipda, opts)?;
        session.previous = s.initial_previous.iter().map(|t| Trace::from_names(t)).collect();
        session.initial.1 = session.previous.clone();
        for inc in &s.increments {
            session.frozen = frozen_from_entries(&session.tree, &inc.frozen)?;
            session.apply_trace(Trace::from_names(&inc.trace), inc.algorithm)?;
        }
        session.frozen = frozen_from_entries(&session.tree, &s.frozen)?;
        Ok(session)
    }
}

fn frozen_from_entries(host: &ProcessTree, entries: &[FrozenEntry]) -> Result<FrozenSet, SessionError> {
    let items = entries
        .iter()
        .map(|e| Ok((host.resolve_path(&e.path)?, Activity::new(e.open.as_str()), Activity::new(e.close.as_str()))))
        .collect::<Result<Vec<(NodeId, Activity, Activity)>, TreeError>>()?;
    Ok(FrozenSet::with_labels(host, items)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::accepts;

    fn log() -> EventLog {
        EventLog::from_variants(&[
            (Trace::parse("a,b,c"), 3),
            (Trace::parse("a,c"), 2),
            (Trace::parse("a,b,b,c"), 1),
        ])
    }

    #[test]
    fn starts_from_the_top_variant() {
        let s = FreezeSession::new(log(), None, "reference", IpdaOptions::default()).unwrap();
        assert_eq!(s.tree().to_string(), "->(a,b,c)");
        assert!(s.is_added(&Trace::parse("a,b,c")));
        assert_eq!(s.reports().len(), 1);
    }

    #[test]
    fn increments_keep_frozen_subtrees_and_undo_restores() {
        let mut s = FreezeSession::new(log(), None, "reference", IpdaOptions::default()).unwrap();
        s.set_frozen(&[vec![0]]).unwrap();
        s.apply_variant(1, Algorithm::Advanced).unwrap();
        for t in s.previous() {
            assert!(accepts(s.tree(), t));
        }
        assert_eq!(s.frozen().len(), 1);
        assert_eq!(s.frozen().items()[0].tree.to_string(), "a");
        let after_one = s.tree().clone();
        s.apply_variant(2, Algorithm::Baseline).unwrap();
        s.undo().unwrap();
        assert_eq!(s.tree(), &after_one);
        assert_eq!(s.reports().len(), 2);
        s.undo().unwrap();
        assert_eq!(s.tree().to_string(), "->(a,b,c)");
        assert!(matches!(s.undo(), Err(SessionError::NothingToUndo)));
    }

    #[test]
    fn seeding_checks_the_tree() {
        let mut s = FreezeSession::new(log(), Some(parse_tree("->(a,X(b,tau),c)").unwrap()), "reference", IpdaOptions::default())
            .unwrap();
        s.seed_previous(Trace::parse("a,c")).unwrap();
        assert!(matches!(
            s.seed_previous(Trace::parse("a,b,b,c")),
            Err(SessionError::Freeze(FreezeError::Precondition { .. }))
        ));
        s.apply_variant(2, Algorithm::Advanced).unwrap();
        assert!(matches!(s.seed_previous(Trace::parse("a,c")), Err(SessionError::AlreadyStarted)));
        assert_eq!(FreezeSession::from_snapshot(&s.snapshot(), IpdaOptions::default()).unwrap().tree(), s.tree());
    }

    #[test]
    fn nested_selection_is_rejected() {
        let mut s = FreezeSession::new(log(), Some(parse_tree("->(X(a,b),c)").unwrap()), "reference", IpdaOptions::default())
            .unwrap();
        assert!(matches!(s.set_frozen(&[vec![0], vec![0, 1]]), Err(SessionError::Freeze(FreezeError::Nested { .. }))));
        assert!(s.frozen().is_empty());
    }

    #[test]
    fn reserved_activities_are_refused() {
        let l = EventLog::from_traces([Trace::parse("a,__open_1")]);
        assert!(matches!(
            FreezeSession::new(l, None, "reference", IpdaOptions::default()),
            Err(SessionError::ReservedActivity(_))
        ));
    }

    #[test]
    fn snapshot_round_trip_replays() {
        let mut s = FreezeSession::new(log(), None, "reference", IpdaOptions::default()).unwrap();
        s.set_frozen(&[vec![1]]).unwrap();
        s.apply_variant(1, Algorithm::Advanced).unwrap();
        s.apply_variant(2, Algorithm::Plain).unwrap();
        let snap = s.snapshot();
        let json = serde_json::to_string(&snap).unwrap();
        let back = FreezeSession::from_snapshot(&serde_json::from_str(&json).unwrap(), IpdaOptions::default()).unwrap();
        assert_eq!(back.tree(), s.tree());
        assert_eq!(back.previous(), s.previous());
        assert_eq!(back.reports(), s.reports());
        assert_eq!(back.snapshot(), snap);
    }
}
