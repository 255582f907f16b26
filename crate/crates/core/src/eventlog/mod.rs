//! Event logs: cases, trace variants, CSV and XES-lite import, JSON-lines
//! dumps.

mod csv_import;
mod xes;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::Deref;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::Trace;
use crate::tree::Activity;

pub use csv_import::{import_csv, import_csv_reader, CsvOptions};
pub use xes::{import_xes_lite, parse_xes_lite};

#[derive(Debug, Error)]
pub enum EventLogError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("the log contains no events")]
    Empty,
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("row {row}: cannot parse timestamp '{value}'")]
    BadTimestamp { row: usize, value: String },
    #[error("row {row}: empty {field}")]
    EmptyField { row: usize, field: String },
    #[error("csv: {0}")]
    Csv(String),
    #[error("xml: {0}")]
    Xml(String),
    #[error("trace {trace}, event {event}: missing concept:name")]
    MissingActivity { trace: usize, event: usize },
    #[error("line {line}: {message}")]
    Json { line: usize, message: String },
}

/// One case of a log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub case: String,
    pub trace: Trace,
}

/// A multiset of traces, kept as cases in import order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventLog {
    cases: Vec<Case>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variant {
    pub trace: Trace,
    pub frequency: usize,
}

/// Variants sorted by descending frequency, ties by trace.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VariantList(Vec<Variant>);

impl Deref for VariantList {
    type Target = [Variant];

    fn deref(&self) -> &[Variant] {
        &self.0
    }
}

impl VariantList {
    pub fn total(&self) -> usize {
        self.0.iter().map(|v| v.frequency).sum()
    }

    pub fn into_inner(self) -> Vec<Variant> {
        self.0
    }
}

impl EventLog {
    pub fn new() -> Self {
        EventLog::default()
    }

    /// Cases are numbered from 1 in iteration order.
    pub fn from_traces(traces: impl IntoIterator<Item = Trace>) -> Self {
        let mut log = EventLog::new();
        for (i, t) in traces.into_iter().enumerate() {
            log.push_case((i + 1).to_string(), t);
        }
        log
    }

    /// Each variant repeated by its frequency.
    pub fn from_variants(variants: &[(Trace, usize)]) -> Self {
        EventLog::from_traces(variants.iter().flat_map(|(t, n)| std::iter::repeat_n(t.clone(), *n)))
    }

    pub fn push_case(&mut self, case: impl Into<String>, trace: Trace) {
        self.cases.push(Case { case: case.into(), trace });
    }

    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn traces(&self) -> impl Iterator<Item = &Trace> {
        self.cases.iter().map(|c| &c.trace)
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn alphabet(&self) -> BTreeSet<Activity> {
        self.traces().flat_map(|t| t.iter().cloned()).collect()
    }

    pub fn multiplicity(&self, trace: &Trace) -> usize {
        self.traces().filter(|t| *t == trace).count()
    }

    pub fn variants(&self) -> VariantList {
        let mut counts: BTreeMap<&Trace, usize> = BTreeMap::new();
        for t in self.traces() {
            *counts.entry(t).or_default() += 1;
        }
        let mut out: Vec<Variant> = counts
            .into_iter()
            .map(|(t, n)| Variant { trace: t.clone(), frequency: n })
            .collect();
        // BTreeMap order is already lexicographic; a stable sort keeps it on ties.
        out.sort_by_key(|v| std::cmp::Reverse(v.frequency));
        VariantList(out)
    }

    /// One `{"case": .., "trace": [..]}` object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let line = serde_json::to_string(c).expect("cases serialize");
            let _ = writeln!(out, "{line}");
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, EventLogError> {
        let mut log = EventLog::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let case: Case =
                serde_json::from_str(line).map_err(|e| EventLogError::Json { line: i + 1, message: e.to_string() })?;
            log.cases.push(case);
        }
        Ok(log)
    }
}

/// Reads a log, choosing the format by extension: `.csv`, `.xes`/`.xml`,
/// otherwise JSON lines.
pub fn import_path(path: &std::path::Path) -> Result<EventLog, EventLogError> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    match ext.as_str() {
        "csv" => import_csv(path, &CsvOptions::default()),
        "xes" | "xml" => import_xes_lite(path),
        _ => {
            let text = read(path)?;
            EventLog::from_jsonl(&text)
        }
    }
}

fn read(path: &std::path::Path) -> Result<String, EventLogError> {
    std::fs::read_to_string(path).map_err(|source| EventLogError::Io { path: path.to_path_buf(), source })
}
